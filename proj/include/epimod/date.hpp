#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace epimod {

/// Calendar date stored as a serial day count (days since 1970-01-01,
/// proleptic Gregorian). Cheap to copy and to step by whole days, which is
/// all the series indexing needs.
class Date {
public:
    Date() = default;
    explicit Date(std::int64_t serial_day) : day_(serial_day) {}
    Date(int year, int month, int day);

    std::int64_t serial() const { return day_; }
    void civil(int& year, int& month, int& day) const;

    Date operator+(std::int64_t days) const { return Date(day_ + days); }
    Date operator-(std::int64_t days) const { return Date(day_ - days); }
    std::int64_t operator-(Date other) const { return day_ - other.day_; }
    auto operator<=>(const Date&) const = default;

    /// ISO-8601, e.g. "2022-01-31".
    std::string to_string() const;

    /// Parses "YYYY-MM-DD". Throws Error(ParseError) on malformed input.
    static Date parse(const std::string& text);

private:
    std::int64_t day_ = 0;
};

} // namespace epimod
