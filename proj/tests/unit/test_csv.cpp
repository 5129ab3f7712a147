#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "p2pscore/csvio.hpp"
#include "p2pscore/errors.hpp"

using namespace p2p;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_SUITE("csv") {

TEST_CASE("format_double round trips exactly") {
    for (double v : {0.1, 1.0 / 3.0, -2.7182818284590452, 1e-13, 123456.789, -0.9999,
                     0.15000000000000002, 5e-324, 1.7976931348623157e308}) {
        CHECK(parse_double(format_double(v)) == v);
    }
}

TEST_CASE("integral doubles print as integers") {
    CHECK(format_double(20000.0) == "20000");
    CHECK(format_double(-3.0) == "-3");
    CHECK(format_double(0.0) == "0");
    CHECK(parse_double("20000") == 20000.0);
}

TEST_CASE("parse rejects junk") {
    CHECK_THROWS_AS(parse_double("12x"), ParseError);
    CHECK_THROWS_AS(parse_double(""), ParseError);
    CHECK_THROWS_AS(parse_long("1.5"), ParseError);
    CHECK_THROWS_AS(parse_long("abc"), ParseError);
    CHECK(parse_long("-42") == -42);
}

TEST_CASE("rfc4180 parsing") {
    CsvTable t = parse_csv("a,b,c\n1,\"two, three\",\"say \"\"hi\"\"\"\n4,\"line\nbreak\",6\r\n");
    CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][1] == "two, three");
    CHECK(t.rows[0][2] == "say \"hi\"");
    CHECK(t.rows[1][1] == "line\nbreak");
    CHECK(t.column("b") == 1);
    CHECK_THROWS_AS(t.column("missing"), SchemaError);
}

TEST_CASE("ragged rows are parse errors with a row number") {
    try {
        parse_csv("a,b\n1,2\n3\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.row == 3);
    }
}

TEST_CASE("empty file is an error, header-only is fine") {
    CHECK_THROWS_AS(parse_csv(""), ParseError);
    CsvTable t = parse_csv("x,y\n");
    CHECK(t.rows.empty());
}

TEST_CASE("write and reread round trips, including quoting") {
    std::string path = "test_csv_roundtrip.tmp.csv";
    std::vector<std::string> header{"id", "note"};
    std::vector<std::vector<std::string>> rows{
        {"1", "plain"},
        {"2", "with, comma"},
        {"3", "with \"quotes\""},
        {"4", "multi\nline"},
    };
    write_csv(path, header, rows);
    CsvTable t = read_csv(path);
    CHECK(t.header == header);
    CHECK(t.rows == rows);
    std::remove(path.c_str());
}

TEST_CASE("writing is byte-stable") {
    std::string a = "test_csv_stable_a.tmp.csv";
    std::string b = "test_csv_stable_b.tmp.csv";
    std::vector<std::string> header{"v"};
    std::vector<std::vector<std::string>> rows{{format_double(0.1)}, {format_double(1e300)}};
    write_csv(a, header, rows);
    write_csv(b, header, rows);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) == "v\n0.1\n1e+300\n");
    std::remove(a.c_str());
    std::remove(b.c_str());
}

TEST_CASE("read_csv of a missing file is an IoError") {
    CHECK_THROWS_AS(read_csv("definitely_not_here.csv"), IoError);
}

}  // TEST_SUITE
