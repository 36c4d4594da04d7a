#ifndef DRI_NUMERIC_HPP
#define DRI_NUMERIC_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

#include "dri/fips.hpp"

namespace dri {

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string format_int(std::int64_t v) { return std::to_string(v); }

namespace detail {

// Drops surrounding quotes/blanks and thousands separators: "\"65,432\"" -> "65432".
inline std::string strip_number(std::string_view raw) {
    std::string out;
    for (char c : trim(raw))
        if (c != ',') out.push_back(c);
    return out;
}

}  // namespace detail

/// Strict decimal parse of a whole cell; nullopt on trailing garbage or non-finite.
inline std::optional<double> parse_double(std::string_view raw) {
    const auto s = detail::strip_number(raw);
    if (s.empty()) return std::nullopt;
    const char* first = s.data();
    if (*first == '+') ++first;
    double v = 0;
    const auto res = std::from_chars(first, s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::optional<std::int64_t> parse_int(std::string_view raw) {
    const auto s = detail::strip_number(raw);
    if (s.empty()) return std::nullopt;
    const char* first = s.data();
    if (*first == '+') ++first;
    std::int64_t v = 0;
    const auto res = std::from_chars(first, s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace dri

#endif  // DRI_NUMERIC_HPP
