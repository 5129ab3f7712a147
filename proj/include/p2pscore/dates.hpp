#pragma once

#include <string>
#include <string_view>

namespace p2p {

// Calendar date. Always holds a valid Gregorian date (constructors validate).
struct Date {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..last day of month

    Date() = default;
    Date(int y, int m, int d);  // throws ParseError if not a real calendar date

    // Days since 1970-01-01 (negative before the epoch).
    long serial() const;

    friend bool operator==(const Date& a, const Date& b) {
        return a.year == b.year && a.month == b.month && a.day == b.day;
    }
    friend bool operator!=(const Date& a, const Date& b) { return !(a == b); }
    friend bool operator<(const Date& a, const Date& b) { return a.serial() < b.serial(); }
    friend bool operator<=(const Date& a, const Date& b) { return a.serial() <= b.serial(); }
};

bool is_valid_date(int year, int month, int day);

// Strict ISO-8601 "YYYY-MM-DD"; throws ParseError on anything else.
Date parse_date(std::string_view text);

std::string format_date(const Date& d);

// Signed day count: serial(b) - serial(a).
long days_between(const Date& a, const Date& b);

// Calendar month arithmetic; the day is clamped to the target month's length
// (2020-01-31 + 1 month = 2020-02-29).
Date add_months(const Date& d, int months);

}  // namespace p2p
