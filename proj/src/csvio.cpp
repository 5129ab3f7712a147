#include "p2pscore/csvio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "p2pscore/errors.hpp"

namespace p2p {

std::string format_double(double v) {
    if (!std::isfinite(v)) throw Error("refusing to format non-finite value");
    if (v == std::floor(v) && std::fabs(v) < 1e15) {
        long long i = static_cast<long long>(v);
        char buf[32];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, i);
        return std::string(buf, ptr);
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError("invalid number '" + std::string(text) + "'");
    }
    return v;
}

long parse_long(std::string_view text) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError("invalid integer '" + std::string(text) + "'");
    }
    return v;
}

size_t CsvTable::column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw SchemaError("missing column '" + name + "'");
}

namespace {

// Splits RFC-4180 text into records of fields. Handles quoted fields with
// embedded separators and doubled quotes; accepts both \n and \r\n.
std::vector<std::vector<std::string>> split_records(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    bool row_started = false;
    size_t line = 1;

    auto end_field = [&] {
        fields.push_back(std::move(cur));
        cur.clear();
    };
    auto end_row = [&] {
        end_field();
        records.push_back(std::move(fields));
        fields.clear();
        row_started = false;
    };

    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                cur += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!cur.empty()) throw ParseError("stray quote inside unquoted field", line);
                in_quotes = true;
                row_started = true;
                break;
            case ',':
                end_field();
                row_started = true;
                break;
            case '\r':
                break;  // handled by the following \n
            case '\n':
                if (row_started || !cur.empty() || !fields.empty()) end_row();
                ++line;
                break;
            default:
                cur += c;
                row_started = true;
                break;
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted field", line);
    if (row_started || !cur.empty() || !fields.empty()) end_row();
    return records;
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
    auto records = split_records(text);
    if (records.empty()) throw ParseError("empty CSV: missing header row");
    CsvTable table;
    table.header = std::move(records.front());
    for (size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.header.size()) {
            throw ParseError("expected " + std::to_string(table.header.size()) + " fields, got " +
                                 std::to_string(records[r].size()),
                             r + 1);
        }
        table.rows.push_back(std::move(records[r]));
    }
    return table;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

std::string csv_escape(std::string_view field) {
    bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    auto write_row = [&out](const std::vector<std::string>& row) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << csv_escape(row[i]);
        }
        out << '\n';
    };
    write_row(header);
    for (const auto& row : rows) write_row(row);
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace p2p
