#ifndef DRI_RUN_CONFIG_HPP
#define DRI_RUN_CONFIG_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dri/classify.hpp"
#include "dri/compare.hpp"
#include "dri/error.hpp"
#include "dri/fips.hpp"
#include "dri/index_core.hpp"
#include "dri/schema.hpp"

namespace dri {

/// One reproducible run: inputs, schema, index settings and output location.
/// Relative paths in a config file resolve against the file's directory.
struct RunConfig {
    std::filesystem::path svi_path;
    std::filesystem::path income_path;
    std::optional<std::filesystem::path> nri_path;
    std::optional<std::filesystem::path> geometry_path;
    std::string geometry_fips_property = "GEOID";
    char delimiter = ',';
    SchemaMapping schema;
    std::optional<std::string> state_fips;  // 2-digit prefix restricting both tables, e.g. "12"
    IndexConfig index;
    bool paper_literal = false;
    std::optional<std::vector<std::string>> class_labels;
    std::filesystem::path output_dir = "out";
    int divergence_threshold = 2;
    std::map<std::string, int> nri_rating_scale = default_nri_rating_scale();

    /// Labels for index.class_count: configured, else built-in (k = 5 only).
    std::vector<std::string> labels() const {
        if (class_labels) {
            if (class_labels->size() != static_cast<std::size_t>(index.class_count))
                throw LabelMismatch(class_labels->size(), static_cast<std::size_t>(index.class_count));
            return *class_labels;
        }
        if (auto d = default_class_labels(index.class_count)) return *d;
        throw ConfigError("class labels must be supplied for " + std::to_string(index.class_count) + " classes");
    }

    void validate() const {
        index.validate();
        if (divergence_threshold < 1) throw ConfigError("divergence_threshold must be >= 1");
        if (state_fips && (state_fips->size() != 2 || !normalize_fips("000" + *state_fips)))
            throw ConfigError("state_fips must be a 2-digit state code");
        if (index.analysis_fips)
            for (const auto& f : *index.analysis_fips)
                if (!is_valid_fips(f)) throw ConfigError("analysis FIPS '" + f + "' is not a 5-digit county code");
    }
};

/// Reads a FIPS list: one code per line, blank lines and '#' comments ignored.
inline std::vector<std::string> read_fips_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read FIPS list " + path.string());
    std::vector<std::string> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto t = trim(line);
        if (t.empty()) continue;
        auto fips = normalize_fips(t);
        if (!fips) throw ConfigError(path.string() + ":" + std::to_string(n) + ": '" + std::string(t) + "' is not a FIPS code");
        out.push_back(*fips);
    }
    return out;
}

namespace detail {

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

inline std::vector<std::string> fips_array(const nlohmann::json& j, const char* what) {
    if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of FIPS strings");
    std::vector<std::string> out;
    for (const auto& v : j) {
        std::optional<std::string> f;
        if (v.is_string()) f = normalize_fips(v.get<std::string>());
        if (!f) throw ConfigError(std::string(what) + " contains an invalid FIPS code: " + v.dump());
        out.push_back(*f);
    }
    return out;
}

}  // namespace detail

inline NormalizationDomain parse_domain(const std::string& s) {
    if (s == "full" || s == "full-dataset") return NormalizationDomain::FullDataset;
    if (s == "subset" || s == "analysis-subset") return NormalizationDomain::AnalysisSubset;
    throw ConfigError("domain must be 'full' or 'subset', got '" + s + "'");
}

inline const char* to_string(NormalizationDomain d) {
    return d == NormalizationDomain::FullDataset ? "full-dataset" : "analysis-subset";
}

inline RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw ConfigError("run config must be a JSON object");
    RunConfig cfg;
    try {
        const auto& in = j.at("inputs");
        cfg.svi_path = detail::resolve(base_dir, in.at("svi").get<std::string>());
        cfg.income_path = detail::resolve(base_dir, in.at("income").get<std::string>());
        if (in.contains("nri") && !in.at("nri").is_null())
            cfg.nri_path = detail::resolve(base_dir, in.at("nri").get<std::string>());
        if (in.contains("geometry") && !in.at("geometry").is_null())
            cfg.geometry_path = detail::resolve(base_dir, in.at("geometry").get<std::string>());

        cfg.geometry_fips_property = j.value("geometry_fips_property", cfg.geometry_fips_property);
        if (j.contains("delimiter")) {
            const auto d = j.at("delimiter").get<std::string>();
            if (d.size() != 1) throw ConfigError("delimiter must be a single character");
            cfg.delimiter = d[0];
        }
        if (j.contains("schema")) {
            const auto& s = j.at("schema");
            cfg.schema = s.is_string() ? load_schema(detail::resolve(base_dir, s.get<std::string>()).string())
                                       : apply_schema_json(cfg.schema, s);
        }
        if (j.contains("schema_overrides")) cfg.schema = apply_schema_json(cfg.schema, j.at("schema_overrides"));
        if (j.contains("state_fips") && !j.at("state_fips").is_null()) cfg.state_fips = j.at("state_fips").get<std::string>();

        if (j.contains("index")) {
            const auto& ix = j.at("index");
            cfg.paper_literal = ix.value("paper_literal", false);
            if (ix.contains("weight")) cfg.index.weight = ix.at("weight").get<double>();
            if (cfg.paper_literal) cfg.index.weight = kPaperLiteralWeight;
            cfg.index.class_count = ix.value("classes", cfg.index.class_count);
            if (ix.contains("labels")) cfg.class_labels = ix.at("labels").get<std::vector<std::string>>();
            if (ix.contains("domain")) cfg.index.domain = parse_domain(ix.at("domain").get<std::string>());
            if (ix.contains("analysis_fips")) cfg.index.analysis_fips = detail::fips_array(ix.at("analysis_fips"), "analysis_fips");
            if (ix.contains("analysis_fips_file"))
                cfg.index.analysis_fips = read_fips_list(detail::resolve(base_dir, ix.at("analysis_fips_file").get<std::string>()));
        }
        if (j.contains("output_dir")) cfg.output_dir = detail::resolve(base_dir, j.at("output_dir").get<std::string>());
        cfg.divergence_threshold = j.value("divergence_threshold", cfg.divergence_threshold);
        if (j.contains("nri_rating_scale")) cfg.nri_rating_scale = j.at("nri_rating_scale").get<std::map<std::string, int>>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("run config: ") + e.what());
    }
    return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read run config " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("run config " + path.string() + ": " + e.what());
    }
    return parse_run_config(j, path.parent_path());
}

/// Command-line overrides layered over a config file.
struct RunOverrides {
    std::optional<double> weight;
    std::optional<int> classes;
    bool paper_literal = false;
    std::optional<std::string> domain;
    std::optional<std::filesystem::path> subset_fips;
    std::optional<std::filesystem::path> output_dir;
};

inline void apply_overrides(RunConfig& cfg, const RunOverrides& o) {
    if (o.weight && o.paper_literal) throw ConfigError("--weight and --paper-literal are mutually exclusive");
    if (o.weight) {
        cfg.index.weight = *o.weight;
        cfg.paper_literal = false;
    }
    if (o.paper_literal) {
        cfg.index.weight = kPaperLiteralWeight;
        cfg.paper_literal = true;
    }
    if (o.classes) cfg.index.class_count = *o.classes;
    if (o.domain) cfg.index.domain = parse_domain(*o.domain);
    if (o.subset_fips) cfg.index.analysis_fips = read_fips_list(*o.subset_fips);
    if (o.output_dir) cfg.output_dir = *o.output_dir;
}

/// Config echo for the run manifest.
inline nlohmann::json run_config_echo(const RunConfig& cfg) {
    nlohmann::json j;
    j["weight"] = cfg.index.weight;
    j["paper_literal"] = cfg.paper_literal;
    j["classes"] = cfg.index.class_count;
    j["domain"] = to_string(cfg.index.domain);
    j["analysis_fips"] = cfg.index.analysis_fips ? nlohmann::json(*cfg.index.analysis_fips) : nlohmann::json(nullptr);
    j["state_fips"] = cfg.state_fips ? nlohmann::json(*cfg.state_fips) : nlohmann::json(nullptr);
    j["divergence_threshold"] = cfg.divergence_threshold;
    j["schema"] = schema_to_json(cfg.schema);
    j["delimiter"] = std::string(1, cfg.delimiter);
    j["geometry_fips_property"] = cfg.geometry_fips_property;
    return j;
}

}  // namespace dri

#endif  // DRI_RUN_CONFIG_HPP
