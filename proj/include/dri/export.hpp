#ifndef DRI_EXPORT_HPP
#define DRI_EXPORT_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dri/classify.hpp"
#include "dri/compare.hpp"
#include "dri/delimited.hpp"
#include "dri/error.hpp"
#include "dri/index_core.hpp"
#include "dri/ingest.hpp"
#include "dri/numeric.hpp"

namespace dri {

/// Everything emitted for one county: raw inputs, index terms and class.
struct ResultRow {
    CountyRecord county;
    DriResult index;
    ClassAssignment cls;
};

inline constexpr std::string_view kResultsCsvHeader =
    "fips,name,population,income,svi,pop_norm,income_norm_inverted,dri,dri_complement,dri_class_index,dri_class_label";

/// Joins records, index results and classes on FIPS. Only scored counties are kept.
inline std::vector<ResultRow> assemble_rows(std::span<const CountyRecord> records, std::span<const DriResult> results,
                                            std::span<const ClassAssignment> classes) {
    std::map<std::string, const CountyRecord*> by_fips;
    for (const auto& r : records) by_fips[r.fips] = &r;
    std::map<std::string, const ClassAssignment*> cls;
    for (const auto& c : classes) cls[c.fips] = &c;

    std::vector<ResultRow> rows;
    rows.reserve(results.size());
    for (const auto& res : results) {
        auto rec = by_fips.find(res.fips);
        auto c = cls.find(res.fips);
        if (rec == by_fips.end() || c == cls.end()) throw Error("no record or class for scored county " + res.fips);
        rows.push_back({*rec->second, res, *c->second});
    }
    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) { return a.county.fips < b.county.fips; });
    return rows;
}

namespace detail {

inline std::size_t emit(std::ostream& out, std::string_view text) {
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw SinkError("write failed");
    return text.size();
}

inline std::vector<std::string> csv_fields(const ResultRow& r) {
    return {r.county.fips,
            r.county.name,
            format_int(r.county.population),
            format_double(r.county.income),
            format_double(r.county.svi),
            format_double(r.index.pop_norm),
            format_double(r.index.income_norm_inverted),
            format_double(r.index.dri),
            format_double(r.index.dri_complement),
            format_int(r.cls.class_index),
            r.cls.class_label};
}

}  // namespace detail

/// Canonical results table. Decimals use the shortest round-trip form; LF endings.
inline std::size_t write_results_csv(std::span<const ResultRow> rows, std::ostream& out) {
    std::string text(kResultsCsvHeader);
    text.push_back('\n');
    for (const auto& r : rows) {
        bool first = true;
        for (const auto& f : detail::csv_fields(r)) {
            if (!first) text.push_back(',');
            text += quote_field(f);
            first = false;
        }
        text.push_back('\n');
    }
    return detail::emit(out, text);
}

/// Inverse of write_results_csv. The state code is recovered from the FIPS prefix.
inline std::vector<ResultRow> read_results_csv(std::string_view text) {
    const auto table = DelimitedTable::parse(text);
    std::vector<std::size_t> idx;
    std::string_view header = kResultsCsvHeader;
    for (std::size_t pos = 0; pos <= header.size();) {
        const auto end = std::min(header.find(',', pos), header.size());
        idx.push_back(table.column(header.substr(pos, end - pos)));
        pos = end + 1;
    }

    std::vector<ResultRow> rows;
    for (const auto& row : table.rows()) {
        const auto field = [&](std::size_t i) -> const std::string& {
            if (idx[i] >= row.fields.size()) throw ParseError(row.line, table.header()[idx[i]], "", "row has too few fields");
            return row.fields[idx[i]];
        };
        const auto number = [&](std::size_t i) {
            auto v = parse_double(field(i));
            if (!v) throw ParseError(row.line, table.header()[idx[i]], field(i));
            return *v;
        };
        const auto integer = [&](std::size_t i) {
            auto v = parse_int(field(i));
            if (!v) throw ParseError(row.line, table.header()[idx[i]], field(i));
            return *v;
        };
        ResultRow r;
        if (!is_valid_fips(field(0))) throw ParseError(row.line, "fips", field(0), "not a county FIPS code");
        r.county.fips = field(0);
        r.county.name = field(1);
        r.county.state = std::string(state_abbrev_for_fips(r.county.fips));
        r.county.population = integer(2);
        r.county.income = number(3);
        r.county.svi = number(4);
        r.index.fips = r.county.fips;
        r.index.svi = r.county.svi;
        r.index.pop_norm = number(5);
        r.index.income_norm_inverted = number(6);
        r.index.dri = number(7);
        r.index.dri_complement = number(8);
        r.cls.fips = r.county.fips;
        r.cls.value = r.index.dri;
        r.cls.class_index = static_cast<int>(integer(9));
        r.cls.class_label = field(10);
        rows.push_back(std::move(r));
    }
    return rows;
}

/// Feature properties carry exactly the CSV columns, in the same order.
inline nlohmann::ordered_json feature_properties(const ResultRow& r) {
    nlohmann::ordered_json p;
    p["fips"] = r.county.fips;
    p["name"] = r.county.name;
    p["population"] = r.county.population;
    p["income"] = r.county.income;
    p["svi"] = r.county.svi;
    p["pop_norm"] = r.index.pop_norm;
    p["income_norm_inverted"] = r.index.income_norm_inverted;
    p["dri"] = r.index.dri;
    p["dri_complement"] = r.index.dri_complement;
    p["dri_class_index"] = r.cls.class_index;
    p["dri_class_label"] = r.cls.class_label;
    return p;
}

struct GeoJsonWriteResult {
    std::size_t bytes = 0;
    std::vector<std::string> omitted_fips;  // results with no geometry
};

/// Choropleth-ready FeatureCollection, one feature per line, FIPS-ascending.
inline GeoJsonWriteResult write_geojson(std::span<const ResultRow> rows, std::span<const CountyGeometry> geometries,
                                        std::ostream& out) {
    std::map<std::string, const CountyGeometry*> geo;
    for (const auto& g : geometries) geo[g.fips] = &g;

    GeoJsonWriteResult res;
    std::string text = "{\"type\":\"FeatureCollection\",\"features\":[";
    bool first = true;
    for (const auto& r : rows) {
        auto it = geo.find(r.county.fips);
        if (it == geo.end()) {
            res.omitted_fips.push_back(r.county.fips);
            continue;
        }
        nlohmann::ordered_json feature;
        feature["type"] = "Feature";
        feature["id"] = r.county.fips;
        feature["properties"] = feature_properties(r);
        feature["geometry"] = it->second->geometry;
        text += first ? "\n" : ",\n";
        text += feature.dump();
        first = false;
    }
    text += "\n]}\n";
    res.bytes = detail::emit(out, text);
    return res;
}

inline nlohmann::json comparison_to_json(const ComparisonReport& report) {
    nlohmann::json j;
    j["n"] = report.n;
    j["k"] = report.k;
    j["spearman_rho"] = report.spearman_rho ? nlohmann::json(*report.spearman_rho) : nlohmann::json(nullptr);
    j["rho_note"] = report.rho_note.empty() ? nlohmann::json(nullptr) : nlohmann::json(report.rho_note);
    j["cross_tab"] = report.cross_tab.counts;
    j["nri_class_source"] = to_string(report.nri_class_source);
    j["divergence_threshold"] = report.divergence_threshold;
    j["divergences"] = nlohmann::json::array();
    for (const auto& d : report.divergences)
        j["divergences"].push_back({{"fips", d.fips}, {"dri_class", d.a_class}, {"nri_class", d.b_class}, {"delta", d.delta}});
    j["diagnostics"] = {{"dri_only", report.dri_only}, {"nri_only", report.nri_only}};
    return j;
}

/// Key-sorted, two-space-indented JSON document.
inline std::size_t write_comparison_json(const ComparisonReport& report, std::ostream& out) {
    return detail::emit(out, comparison_to_json(report).dump(2) + "\n");
}

}  // namespace dri

#endif  // DRI_EXPORT_HPP
