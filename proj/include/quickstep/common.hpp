#pragma once

#include <charconv>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace quickstep {

/// Base class for every error the library reports.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input that does not follow a documented line or field format.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A referenced entity (user, topic, paper) does not exist.
class NotFoundError : public Error {
public:
    using Error::Error;
};

/// A request that is well formed but not allowed in the current state.
class InvalidRequest : public Error {
public:
    using Error::Error;
};

/// The two experimental conditions. Each group owns its taxonomy and training set.
enum class Group { flat, ontology };

inline constexpr Group kAllGroups[] = {Group::flat, Group::ontology};

std::string_view to_string(Group g);
Group parse_group(std::string_view s);

/// Calendar date (UTC), stored as days since 1970-01-01.
struct Date {
    std::int32_t days = 0;

    static Date parse(std::string_view iso);  // YYYY-MM-DD
    static Date from_ymd(int year, unsigned month, unsigned day);
    std::string str() const;

    Date operator+(int n) const { return Date{days + n}; }
    int operator-(Date other) const { return days - other.days; }
    auto operator<=>(const Date&) const = default;
};

/// UTC instant with one-second resolution, printed as YYYY-MM-DDTHH:MM:SSZ.
struct Timestamp {
    std::int64_t seconds = 0;

    /// Accepts a full timestamp or a bare date (midnight).
    static Timestamp parse(std::string_view iso);
    static Timestamp at_midnight(Date d) { return Timestamp{std::int64_t{d.days} * 86400}; }
    static Timestamp now();
    std::string str() const;
    Date date() const;

    Timestamp operator+(std::int64_t s) const { return Timestamp{seconds + s}; }
    auto operator<=>(const Timestamp&) const = default;
};

/// Splits on a single character, keeping empty fields.
std::vector<std::string_view> split(std::string_view line, char sep);

std::string_view trim(std::string_view s);

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double v);
/// Fixed decimals, e.g. format_fixed(0.5, 6) == "0.500000".
std::string format_fixed(double v, int decimals);
/// Rounds to `digits` significant decimal digits (via text, so the result round-trips).
double round_significant(double v, int digits);

double parse_double(std::string_view s);
long long parse_int(std::string_view s);

/// True when a field can be written into a tab-separated line unchanged.
bool is_clean_field(std::string_view s);

/// Portable seeded randomness. std::mt19937_64 is fully specified by the
/// standard; the helpers below avoid the implementation-defined distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    /// Uniform integer in [lo, hi].
    long long between(long long lo, long long hi)
    {
        return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }
    bool chance(double p) { return uniform() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// Stable 64-bit mix for deriving sub-seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t fnv1a(std::string_view s);

}  // namespace quickstep
