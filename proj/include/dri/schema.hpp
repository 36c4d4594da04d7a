#ifndef DRI_SCHEMA_HPP
#define DRI_SCHEMA_HPP

#include <algorithm>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dri/error.hpp"

namespace dri {

struct SviColumns {
    std::string fips = "FIPS";
    std::string county_name = "COUNTY";
    std::string state = "ST_ABBR";
    std::string population = "E_TOTPOP";
    std::string svi = "RPL_THEMES";  // overall percentile ranking across all four themes
};

struct IncomeColumns {
    std::string fips = "GeoFIPS";
    std::string income = "2022";
};

struct NriColumns {
    std::string fips = "STCOFIPS";
    std::string risk_score = "RISK_SCORE";
    std::string risk_rating = "RISK_RATNG";
};

/// Keeps only rows whose `column` equals `value`. BEA CAINC1 stacks three
/// series per county; line code 3 is per-capita personal income.
struct RowFilter {
    std::string column;
    std::string value;
};

/// Source column names for each canonical field. Defaults target the 2022 CDC
/// SVI county CSV, the BEA CAINC1 county CSV and the FEMA NRI county table.
struct SchemaMapping {
    SviColumns svi_columns;
    IncomeColumns income_columns;
    NriColumns nri_columns;
    std::optional<RowFilter> income_row_filter = RowFilter{"LineCode", "3"};
    std::vector<std::string> missing_sentinels = {"-999", "(NA)"};

    bool is_missing(std::string_view cell) const {
        return std::find(missing_sentinels.begin(), missing_sentinels.end(), cell) != missing_sentinels.end();
    }
};

namespace detail {

inline void read_column(const nlohmann::json& obj, const char* key, std::string& target) {
    if (!obj.contains(key)) return;
    if (!obj.at(key).is_string() || obj.at(key).get<std::string>().empty())
        throw ConfigError(std::string("schema column '") + key + "' must be a non-empty string");
    target = obj.at(key).get<std::string>();
}

inline void check_keys(const nlohmann::json& obj, const char* section, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) throw ConfigError(std::string("schema section '") + section + "' must be an object");
    for (const auto& [key, _] : obj.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError(std::string("unknown field '") + key + "' in schema section '" + section + "'");
}

}  // namespace detail

/// Overlays the fields present in `j` onto `base`. Unknown canonical fields are
/// rejected so a typo cannot silently fall back to a default column.
inline SchemaMapping apply_schema_json(SchemaMapping base, const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("schema mapping must be a JSON object");
    if (j.contains("svi_columns")) {
        const auto& s = j.at("svi_columns");
        detail::check_keys(s, "svi_columns", {"fips", "county_name", "state", "population", "svi"});
        detail::read_column(s, "fips", base.svi_columns.fips);
        detail::read_column(s, "county_name", base.svi_columns.county_name);
        detail::read_column(s, "state", base.svi_columns.state);
        detail::read_column(s, "population", base.svi_columns.population);
        detail::read_column(s, "svi", base.svi_columns.svi);
    }
    if (j.contains("income_columns")) {
        const auto& s = j.at("income_columns");
        detail::check_keys(s, "income_columns", {"fips", "income"});
        detail::read_column(s, "fips", base.income_columns.fips);
        detail::read_column(s, "income", base.income_columns.income);
    }
    if (j.contains("nri_columns")) {
        const auto& s = j.at("nri_columns");
        detail::check_keys(s, "nri_columns", {"fips", "risk_score", "risk_rating"});
        detail::read_column(s, "fips", base.nri_columns.fips);
        detail::read_column(s, "risk_score", base.nri_columns.risk_score);
        detail::read_column(s, "risk_rating", base.nri_columns.risk_rating);
    }
    if (j.contains("income_row_filter")) {
        const auto& f = j.at("income_row_filter");
        if (f.is_null()) {
            base.income_row_filter.reset();
        } else {
            detail::check_keys(f, "income_row_filter", {"column", "value"});
            RowFilter filter;
            detail::read_column(f, "column", filter.column);
            if (!f.contains("value") || !f.at("value").is_string())
                throw ConfigError("income_row_filter.value must be a string");
            filter.value = f.at("value").get<std::string>();
            if (filter.column.empty()) throw ConfigError("income_row_filter.column is required");
            base.income_row_filter = filter;
        }
    }
    if (j.contains("missing_sentinels")) {
        const auto& m = j.at("missing_sentinels");
        if (!m.is_array()) throw ConfigError("missing_sentinels must be an array of strings");
        base.missing_sentinels.clear();
        for (const auto& v : m) {
            if (!v.is_string()) throw ConfigError("missing_sentinels must be an array of strings");
            base.missing_sentinels.push_back(v.get<std::string>());
        }
    }
    return base;
}

inline nlohmann::json schema_to_json(const SchemaMapping& m) {
    nlohmann::json j;
    j["svi_columns"] = {{"fips", m.svi_columns.fips},
                        {"county_name", m.svi_columns.county_name},
                        {"state", m.svi_columns.state},
                        {"population", m.svi_columns.population},
                        {"svi", m.svi_columns.svi}};
    j["income_columns"] = {{"fips", m.income_columns.fips}, {"income", m.income_columns.income}};
    j["nri_columns"] = {{"fips", m.nri_columns.fips},
                        {"risk_score", m.nri_columns.risk_score},
                        {"risk_rating", m.nri_columns.risk_rating}};
    if (m.income_row_filter)
        j["income_row_filter"] = {{"column", m.income_row_filter->column}, {"value", m.income_row_filter->value}};
    else
        j["income_row_filter"] = nullptr;
    j["missing_sentinels"] = m.missing_sentinels;
    return j;
}

inline SchemaMapping load_schema(const std::string& path, SchemaMapping base = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read schema mapping " + path);
    try {
        return apply_schema_json(std::move(base), nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("schema mapping " + path + ": " + e.what());
    }
}

}  // namespace dri

#endif  // DRI_SCHEMA_HPP
