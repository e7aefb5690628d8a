#include "quickstep/common.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace quickstep {

std::string_view to_string(Group g)
{
    return g == Group::flat ? "flat" : "ontology";
}

Group parse_group(std::string_view s)
{
    if (s == "flat") {
        return Group::flat;
    }
    if (s == "ontology") {
        return Group::ontology;
    }
    throw ParseError("unknown group '" + std::string(s) + "'");
}

namespace {

int parse_digits(std::string_view s, std::size_t pos, std::size_t n, std::string_view whole)
{
    int value = 0;
    if (pos + n > s.size()) {
        throw ParseError("bad date/time '" + std::string(whole) + "'");
    }
    for (std::size_t i = pos; i < pos + n; ++i) {
        if (s[i] < '0' || s[i] > '9') {
            throw ParseError("bad date/time '" + std::string(whole) + "'");
        }
        value = value * 10 + (s[i] - '0');
    }
    return value;
}

void expect_char(std::string_view s, std::size_t pos, char c)
{
    if (pos >= s.size() || s[pos] != c) {
        throw ParseError("bad date/time '" + std::string(s) + "'");
    }
}

}  // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day)
{
    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
    if (!ymd.ok()) {
        throw ParseError("invalid calendar date");
    }
    return Date{static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count())};
}

Date Date::parse(std::string_view iso)
{
    if (iso.size() != 10) {
        throw ParseError("bad date '" + std::string(iso) + "'");
    }
    expect_char(iso, 4, '-');
    expect_char(iso, 7, '-');
    const int y = parse_digits(iso, 0, 4, iso);
    const int m = parse_digits(iso, 5, 2, iso);
    const int d = parse_digits(iso, 8, 2, iso);
    try {
        return from_ymd(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
    } catch (const ParseError&) {
        throw ParseError("bad date '" + std::string(iso) + "'");
    }
}

std::string Date::str() const
{
    using namespace std::chrono;
    const year_month_day ymd{sys_days{std::chrono::days{days}}};
    std::array<char, 16> buf{};
    std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
        static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf.data();
}

Timestamp Timestamp::parse(std::string_view iso)
{
    if (iso.size() == 10) {
        return at_midnight(Date::parse(iso));
    }
    if (iso.size() != 20) {
        throw ParseError("bad timestamp '" + std::string(iso) + "'");
    }
    const Date d = Date::parse(iso.substr(0, 10));
    expect_char(iso, 10, 'T');
    expect_char(iso, 13, ':');
    expect_char(iso, 16, ':');
    expect_char(iso, 19, 'Z');
    const int hh = parse_digits(iso, 11, 2, iso);
    const int mm = parse_digits(iso, 14, 2, iso);
    const int ss = parse_digits(iso, 17, 2, iso);
    if (hh > 23 || mm > 59 || ss > 59) {
        throw ParseError("bad timestamp '" + std::string(iso) + "'");
    }
    return Timestamp{std::int64_t{d.days} * 86400 + hh * 3600 + mm * 60 + ss};
}

Timestamp Timestamp::now()
{
    using namespace std::chrono;
    return Timestamp{std::chrono::duration_cast<std::chrono::seconds>(system_clock::now().time_since_epoch()).count()};
}

Date Timestamp::date() const
{
    auto d = seconds / 86400;
    if (seconds % 86400 < 0) {
        --d;
    }
    return Date{static_cast<std::int32_t>(d)};
}

std::string Timestamp::str() const
{
    const Date d = date();
    const auto rem = seconds - std::int64_t{d.days} * 86400;
    std::array<char, 16> buf{};
    std::snprintf(buf.data(), buf.size(), "T%02d:%02d:%02dZ", static_cast<int>(rem / 3600),
        static_cast<int>(rem / 60 % 60), static_cast<int>(rem % 60));
    return d.str() + buf.data();
}

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string format_double(double v)
{
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

std::string format_fixed(double v, int decimals)
{
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, decimals);
    return std::string(buf.data(), end);
}

double round_significant(double v, int digits)
{
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::scientific, digits - 1);
    return parse_double(std::string_view(buf.data(), static_cast<std::size_t>(end - buf.data())));
}

double parse_double(std::string_view s)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ParseError("bad number '" + std::string(s) + "'");
    }
    return v;
}

long long parse_int(std::string_view s)
{
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError("bad integer '" + std::string(s) + "'");
    }
    return v;
}

bool is_clean_field(std::string_view s)
{
    return !s.empty() && s.find_first_of("\t\r\n") == std::string_view::npos;
}

std::uint64_t Rng::below(std::uint64_t n)
{
    if (n == 0) {
        throw std::invalid_argument("Rng::below(0)");
    }
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = engine_();
    while (x >= limit) {
        x = engine_();
    }
    return x % n;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b)
{
    // splitmix64 finalizer over the combined words
    std::uint64_t z = a * 0x9e3779b97f4a7c15ULL + b + 0x632be59bd9b4e019ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace quickstep
