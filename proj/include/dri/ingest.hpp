#ifndef DRI_INGEST_HPP
#define DRI_INGEST_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dri/delimited.hpp"
#include "dri/error.hpp"
#include "dri/fips.hpp"
#include "dri/numeric.hpp"
#include "dri/schema.hpp"

namespace dri {

/// One county's raw inputs to the index.
struct CountyRecord {
    std::string fips;
    std::string name;
    std::string state;
    std::int64_t population = 0;
    double income = 0.0;  // US dollars per person per year
    double svi = 0.0;     // [0, 1]

    friend bool operator==(const CountyRecord&, const CountyRecord&) = default;
};

struct SviRow {
    std::string fips;
    std::string name;
    std::string state;
    std::int64_t population = 0;
    double svi = 0.0;
};

struct IncomeRow {
    std::string fips;
    double income = 0.0;
};

struct NriRecord {
    std::string fips;
    double risk_score = 0.0;
    std::string risk_rating;
};

struct CountyGeometry {
    std::string fips;
    nlohmann::json geometry;  // GeoJSON Polygon or MultiPolygon, passed through verbatim
};

/// A row held back from computation because a mapped cell carried a missing-value sentinel.
struct RejectedRow {
    std::size_t line = 0;
    std::string fips;
    std::string column;
    std::string raw;
    std::string reason;
};

struct SviTable {
    std::vector<SviRow> rows;
    std::vector<RejectedRow> rejected;
};

struct IncomeTable {
    std::vector<IncomeRow> rows;
    std::vector<RejectedRow> rejected;
    std::size_t aggregate_rows_excluded = 0;
    std::size_t filtered_rows = 0;  // dropped by SchemaMapping::income_row_filter
};

struct NriTable {
    std::vector<NriRecord> records;
    std::vector<RejectedRow> rejected;
};

struct JoinDiagnostics {
    std::vector<std::string> svi_only;
    std::vector<std::string> income_only;

    bool empty() const noexcept { return svi_only.empty() && income_only.empty(); }
};

struct JoinResult {
    std::vector<CountyRecord> records;
    JoinDiagnostics diagnostics;
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    return std::string{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

namespace detail {

inline const std::string& cell(const DelimitedRow& row, std::size_t idx, const std::string& column) {
    if (idx >= row.fields.size()) throw ParseError(row.line, column, "", "row has too few fields");
    return row.fields[idx];
}

inline std::string parse_fips_cell(const DelimitedRow& row, std::size_t idx, const std::string& column) {
    const auto& raw = cell(row, idx, column);
    auto fips = normalize_fips(raw);
    if (!fips) throw ParseError(row.line, column, raw, "not a county FIPS code");
    return *fips;
}

class FipsGuard {
public:
    void claim(const std::string& fips) {
        if (!seen_.insert(fips).second) throw DuplicateFips(fips);
    }

private:
    std::set<std::string> seen_;
};

}  // namespace detail

/// CDC SVI county table -> {fips, name, state, population, svi}. Rows whose
/// SVI or population cell is a missing sentinel go to `rejected`.
inline SviTable parse_svi_table(std::string_view text, const SchemaMapping& mapping, char delimiter = ',') {
    const auto table = DelimitedTable::parse(text, delimiter);
    const auto& cols = mapping.svi_columns;
    const auto fips_i = table.column(cols.fips);
    const auto name_i = table.column(cols.county_name);
    const auto state_i = table.column(cols.state);
    const auto pop_i = table.column(cols.population);
    const auto svi_i = table.column(cols.svi);

    SviTable out;
    detail::FipsGuard guard;
    for (const auto& row : table.rows()) {
        SviRow r;
        r.fips = detail::parse_fips_cell(row, fips_i, cols.fips);
        guard.claim(r.fips);

        const auto& svi_raw = detail::cell(row, svi_i, cols.svi);
        const auto& pop_raw = detail::cell(row, pop_i, cols.population);
        if (mapping.is_missing(std::string(trim(svi_raw)))) {
            out.rejected.push_back({row.line, r.fips, cols.svi, svi_raw, "missing sentinel"});
            continue;
        }
        if (mapping.is_missing(std::string(trim(pop_raw)))) {
            out.rejected.push_back({row.line, r.fips, cols.population, pop_raw, "missing sentinel"});
            continue;
        }

        r.name = std::string(trim(detail::cell(row, name_i, cols.county_name)));
        const auto& state_raw = detail::cell(row, state_i, cols.state);
        r.state = std::string(trim(state_raw));
        if (r.state.size() != 2 ||
            !std::all_of(r.state.begin(), r.state.end(), [](char c) { return c >= 'A' && c <= 'Z'; }))
            throw ParseError(row.line, cols.state, state_raw, "expected a 2-letter state code");

        const auto pop = parse_int(pop_raw);
        if (!pop || *pop < 0) throw ParseError(row.line, cols.population, pop_raw, "population must be a non-negative integer");
        r.population = *pop;

        const auto svi = parse_double(svi_raw);
        if (!svi || *svi < 0.0 || *svi > 1.0) throw ParseError(row.line, cols.svi, svi_raw, "SVI must lie in [0, 1]");
        r.svi = *svi;
        out.rows.push_back(std::move(r));
    }
    return out;
}

/// BEA per-capita personal income table -> {fips, income}. Aggregate rows
/// (FIPS ending in 000) are excluded and counted.
inline IncomeTable parse_income_table(std::string_view text, const SchemaMapping& mapping, char delimiter = ',') {
    const auto table = DelimitedTable::parse(text, delimiter);
    const auto& cols = mapping.income_columns;
    const auto fips_i = table.column(cols.fips);
    const auto income_i = table.column(cols.income);
    std::optional<std::size_t> filter_i;
    if (mapping.income_row_filter) filter_i = table.column(mapping.income_row_filter->column);

    IncomeTable out;
    detail::FipsGuard guard;
    for (const auto& row : table.rows()) {
        if (filter_i) {
            // Short rows are trailing notes in BEA downloads.
            if (*filter_i >= row.fields.size() || trim(row.fields[*filter_i]) != mapping.income_row_filter->value) {
                ++out.filtered_rows;
                continue;
            }
        }
        IncomeRow r;
        r.fips = detail::parse_fips_cell(row, fips_i, cols.fips);
        if (is_aggregate_fips(r.fips)) {
            ++out.aggregate_rows_excluded;
            continue;
        }
        guard.claim(r.fips);

        const auto& raw = detail::cell(row, income_i, cols.income);
        if (mapping.is_missing(std::string(trim(raw)))) {
            out.rejected.push_back({row.line, r.fips, cols.income, raw, "missing sentinel"});
            continue;
        }
        const auto income = parse_double(raw);
        if (!income || *income <= 0.0) throw ParseError(row.line, cols.income, raw, "income must be a positive number");
        r.income = *income;
        out.rows.push_back(std::move(r));
    }
    return out;
}

/// FEMA National Risk Index county table.
inline NriTable parse_nri_table(std::string_view text, const SchemaMapping& mapping, char delimiter = ',') {
    const auto table = DelimitedTable::parse(text, delimiter);
    const auto& cols = mapping.nri_columns;
    const auto fips_i = table.column(cols.fips);
    const auto score_i = table.column(cols.risk_score);
    const auto rating_i = table.column(cols.risk_rating);

    NriTable out;
    detail::FipsGuard guard;
    for (const auto& row : table.rows()) {
        NriRecord r;
        r.fips = detail::parse_fips_cell(row, fips_i, cols.fips);
        guard.claim(r.fips);
        const auto& raw = detail::cell(row, score_i, cols.risk_score);
        if (mapping.is_missing(std::string(trim(raw))) || trim(raw).empty()) {
            out.rejected.push_back({row.line, r.fips, cols.risk_score, raw, "missing sentinel"});
            continue;
        }
        const auto score = parse_double(raw);
        if (!score || *score < 0.0) throw ParseError(row.line, cols.risk_score, raw, "risk score must be >= 0");
        r.risk_score = *score;
        r.risk_rating = std::string(trim(detail::cell(row, rating_i, cols.risk_rating)));
        out.records.push_back(std::move(r));
    }
    return out;
}

/// GeoJSON FeatureCollection -> one polygonal geometry per county.
inline std::vector<CountyGeometry> parse_geometry(std::string_view text, const std::string& fips_property) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw GeometryError(std::string("invalid GeoJSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
        !doc.at("features").is_array())
        throw GeometryError("expected a GeoJSON FeatureCollection");

    std::vector<CountyGeometry> out;
    detail::FipsGuard guard;
    std::size_t index = 0;
    for (auto& feature : doc.at("features")) {
        const auto where = "feature " + std::to_string(index++);
        if (!feature.is_object() || !feature.contains("properties") || !feature.at("properties").is_object())
            throw GeometryError(where + " has no properties object");
        const auto& props = feature.at("properties");
        if (!props.contains(fips_property)) throw GeometryError(where + " lacks property '" + fips_property + "'");
        const auto& raw = props.at(fips_property);
        std::optional<std::string> fips;
        if (raw.is_string())
            fips = normalize_fips(raw.get<std::string>());
        else if (raw.is_number_unsigned() || raw.is_number_integer())
            fips = normalize_fips(std::to_string(raw.get<std::int64_t>()));
        if (!fips) throw GeometryError(where + ": property '" + fips_property + "' is not a county FIPS code");

        if (!feature.contains("geometry") || !feature.at("geometry").is_object())
            throw GeometryError(where + " (" + *fips + ") has no geometry");
        const auto type = feature.at("geometry").value("type", "");
        if (type != "Polygon" && type != "MultiPolygon")
            throw GeometryError(where + " (" + *fips + ") has non-polygonal geometry '" + type + "'");
        guard.claim(*fips);
        out.push_back({*fips, std::move(feature.at("geometry"))});
    }
    return out;
}

// File-path entry points for each parser.
inline SviTable parse_svi_file(const std::filesystem::path& path, const SchemaMapping& mapping, char delimiter = ',') {
    return parse_svi_table(std::string_view(read_file(path)), mapping, delimiter);
}
inline IncomeTable parse_income_file(const std::filesystem::path& path, const SchemaMapping& mapping,
                                     char delimiter = ',') {
    return parse_income_table(std::string_view(read_file(path)), mapping, delimiter);
}
inline NriTable parse_nri_file(const std::filesystem::path& path, const SchemaMapping& mapping, char delimiter = ',') {
    return parse_nri_table(std::string_view(read_file(path)), mapping, delimiter);
}
inline std::vector<CountyGeometry> parse_geometry_file(const std::filesystem::path& path, const std::string& fips_property) {
    return parse_geometry(std::string_view(read_file(path)), fips_property);
}

/// Inner join on FIPS, optionally restricted to `filter`. Output is FIPS-sorted.
inline JoinResult join_counties(const std::vector<SviRow>& svi_rows, const std::vector<IncomeRow>& income_rows,
                                const std::optional<std::vector<std::string>>& filter = std::nullopt) {
    std::optional<std::set<std::string>> keep;
    if (filter) keep.emplace(filter->begin(), filter->end());
    const auto wanted = [&](const std::string& fips) { return !keep || keep->count(fips) > 0; };

    std::map<std::string, const SviRow*> svi;
    for (const auto& r : svi_rows)
        if (wanted(r.fips)) svi.emplace(r.fips, &r);
    std::map<std::string, double> income;
    for (const auto& r : income_rows)
        if (wanted(r.fips)) income.emplace(r.fips, r.income);

    JoinResult out;
    for (const auto& [fips, row] : svi) {
        auto it = income.find(fips);
        if (it == income.end()) {
            out.diagnostics.svi_only.push_back(fips);
            continue;
        }
        out.records.push_back({fips, row->name, row->state, row->population, it->second, row->svi});
    }
    for (const auto& [fips, _] : income)
        if (!svi.count(fips)) out.diagnostics.income_only.push_back(fips);
    if (out.records.empty()) throw EmptyJoin();
    return out;
}

}  // namespace dri

#endif  // DRI_INGEST_HPP
