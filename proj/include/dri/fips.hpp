#ifndef DRI_FIPS_HPP
#define DRI_FIPS_HPP

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace dri {

inline std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n\"'";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

inline bool is_valid_fips(std::string_view fips) {
    return fips.size() == 5 && std::all_of(fips.begin(), fips.end(), [](char c) { return c >= '0' && c <= '9'; });
}

/// Canonical 5-character county FIPS. Numeric codes that lost their leading
/// zeros (e.g. BEA GeoFIPS 1001 for Autauga, AL) are left-padded; anything that
/// is not 1-5 digits after trimming yields nullopt.
inline std::optional<std::string> normalize_fips(std::string_view raw) {
    const auto s = trim(raw);
    if (s.empty() || s.size() > 5) return std::nullopt;
    if (!std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) return std::nullopt;
    return std::string(5 - s.size(), '0') + std::string(s);
}

/// State and national aggregate rows in BEA county tables.
inline bool is_aggregate_fips(std::string_view fips) { return fips.size() == 5 && fips.substr(2) == "000"; }

/// USPS abbreviation for the state part of a county FIPS, empty if unknown.
inline std::string_view state_abbrev_for_fips(std::string_view fips) {
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 56> table{{
        {"01", "AL"}, {"02", "AK"}, {"04", "AZ"}, {"05", "AR"}, {"06", "CA"}, {"08", "CO"}, {"09", "CT"},
        {"10", "DE"}, {"11", "DC"}, {"12", "FL"}, {"13", "GA"}, {"15", "HI"}, {"16", "ID"}, {"17", "IL"},
        {"18", "IN"}, {"19", "IA"}, {"20", "KS"}, {"21", "KY"}, {"22", "LA"}, {"23", "ME"}, {"24", "MD"},
        {"25", "MA"}, {"26", "MI"}, {"27", "MN"}, {"28", "MS"}, {"29", "MO"}, {"30", "MT"}, {"31", "NE"},
        {"32", "NV"}, {"33", "NH"}, {"34", "NJ"}, {"35", "NM"}, {"36", "NY"}, {"37", "NC"}, {"38", "ND"},
        {"39", "OH"}, {"40", "OK"}, {"41", "OR"}, {"42", "PA"}, {"44", "RI"}, {"45", "SC"}, {"46", "SD"},
        {"47", "TN"}, {"48", "TX"}, {"49", "UT"}, {"50", "VT"}, {"51", "VA"}, {"53", "WA"}, {"54", "WV"},
        {"55", "WI"}, {"56", "WY"}, {"60", "AS"}, {"66", "GU"}, {"69", "MP"}, {"72", "PR"}, {"78", "VI"},
    }};
    if (fips.size() < 2) return {};
    const auto prefix = fips.substr(0, 2);
    for (const auto& [code, abbrev] : table)
        if (code == prefix) return abbrev;
    return {};
}

}  // namespace dri

#endif  // DRI_FIPS_HPP
