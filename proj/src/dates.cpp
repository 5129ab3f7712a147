#include "p2pscore/dates.hpp"

#include <charconv>
#include <chrono>

#include "p2pscore/errors.hpp"

namespace p2p {

namespace {

namespace chr = std::chrono;

chr::year_month_day to_ymd(const Date& d) {
    return chr::year_month_day{chr::year{d.year}, chr::month{static_cast<unsigned>(d.month)},
                               chr::day{static_cast<unsigned>(d.day)}};
}

int parse_int_field(std::string_view text, size_t pos, size_t len) {
    int value = 0;
    const char* first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, value);
    if (ec != std::errc{} || ptr != first + len) {
        throw ParseError("invalid date field in '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

bool is_valid_date(int year, int month, int day) {
    if (year < 1 || month < 1 || month > 12 || day < 1) return false;
    chr::year_month_day ymd{chr::year{year}, chr::month{static_cast<unsigned>(month)},
                            chr::day{static_cast<unsigned>(day)}};
    return ymd.ok();
}

Date::Date(int y, int m, int d) : year(y), month(m), day(d) {
    if (!is_valid_date(y, m, d)) {
        throw ParseError("invalid calendar date " + std::to_string(y) + "-" + std::to_string(m) +
                         "-" + std::to_string(d));
    }
}

long Date::serial() const {
    return chr::sys_days{to_ymd(*this)}.time_since_epoch().count();
}

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw ParseError("expected date as YYYY-MM-DD, got '" + std::string(text) + "'");
    }
    int y = parse_int_field(text, 0, 4);
    int m = parse_int_field(text, 5, 2);
    int d = parse_int_field(text, 8, 2);
    return Date(y, m, d);
}

std::string format_date(const Date& d) {
    char buf[11];
    auto two = [](char* p, int v) {
        p[0] = static_cast<char>('0' + v / 10);
        p[1] = static_cast<char>('0' + v % 10);
    };
    int y = d.year;
    buf[0] = static_cast<char>('0' + y / 1000 % 10);
    buf[1] = static_cast<char>('0' + y / 100 % 10);
    buf[2] = static_cast<char>('0' + y / 10 % 10);
    buf[3] = static_cast<char>('0' + y % 10);
    buf[4] = '-';
    two(buf + 5, d.month);
    buf[7] = '-';
    two(buf + 8, d.day);
    return std::string(buf, 10);
}

long days_between(const Date& a, const Date& b) { return b.serial() - a.serial(); }

Date add_months(const Date& d, int months) {
    chr::year_month ym{chr::year{d.year}, chr::month{static_cast<unsigned>(d.month)}};
    ym += chr::months{months};
    unsigned last = static_cast<unsigned>(
        chr::year_month_day_last{ym.year(), chr::month_day_last{ym.month()}}.day());
    unsigned day = std::min(static_cast<unsigned>(d.day), last);
    return Date(static_cast<int>(ym.year()), static_cast<unsigned>(ym.month()),
                static_cast<int>(day));
}

}  // namespace p2p
