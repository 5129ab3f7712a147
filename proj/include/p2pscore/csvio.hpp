#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace p2p {

// Shortest decimal string that parses back to exactly the same double.
// Integral values print without exponent or trailing ".0" for readability.
std::string format_double(double v);

double parse_double(std::string_view text);  // throws ParseError
long parse_long(std::string_view text);      // throws ParseError

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // each row has header.size() cells

    // Column index by name; throws SchemaError if absent.
    size_t column(const std::string& name) const;
};

// RFC-4180 reader: quoted fields, embedded commas/quotes/newlines, CRLF line
// ends. The first record is the header. Throws IoError / ParseError.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(std::string_view text);

// RFC-4180 writer: fields containing comma, quote, or newline are quoted;
// quotes are doubled. Rows get "\n" line ends. Throws IoError.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::string csv_escape(std::string_view field);

}  // namespace p2p
