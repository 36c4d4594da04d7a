#ifndef DRI_PIPELINE_HPP
#define DRI_PIPELINE_HPP

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <spdlog/spdlog.h>

#include "json.hpp"

#include "dri/classify.hpp"
#include "dri/compare.hpp"
#include "dri/digest.hpp"
#include "dri/error.hpp"
#include "dri/export.hpp"
#include "dri/index_core.hpp"
#include "dri/ingest.hpp"
#include "dri/run_config.hpp"
#include "dri/version.hpp"

namespace dri {

/// Process exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitFindings = 2 };

inline constexpr const char* kResultsCsvName = "results.csv";
inline constexpr const char* kResultsGeoJsonName = "results.geojson";
inline constexpr const char* kManifestName = "manifest.json";
inline constexpr const char* kComparisonName = "comparison.json";
inline constexpr const char* kComparisonManifestName = "comparison.manifest.json";

/// Output files are written beside their destination under a temporary name and
/// renamed into place on commit(); anything uncommitted is deleted.
class OutputStage {
public:
    explicit OutputStage(std::filesystem::path dir) : dir_(std::move(dir)) {}
    OutputStage(const OutputStage&) = delete;
    OutputStage& operator=(const OutputStage&) = delete;

    ~OutputStage() {
        std::error_code ec;
        for (const auto& [_, tmp] : staged_) std::filesystem::remove(tmp, ec);
    }

    void stage(const std::string& name, const std::string& content) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw SinkError("cannot create output directory " + dir_.string() + ": " + ec.message());
        const auto tmp = dir_ / ("." + name + ".tmp");
        staged_.emplace_back(dir_ / name, tmp);
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.close();
        if (!out) throw SinkError("cannot write " + tmp.string());
    }

    /// Renames staged files in staging order.
    void commit() {
        for (auto it = staged_.begin(); it != staged_.end();) {
            std::error_code ec;
            std::filesystem::rename(it->second, it->first, ec);
            if (ec) throw SinkError("cannot move " + it->second.string() + " into place: " + ec.message());
            it = staged_.erase(it);
        }
    }

private:
    std::filesystem::path dir_;
    std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged_;  // (final, temporary)
};

struct LoadedInputs {
    SviTable svi;
    IncomeTable income;
    std::optional<NriTable> nri;
    std::optional<std::vector<CountyGeometry>> geometry;
    JoinResult join;
    nlohmann::json digests = nlohmann::json::object();
};

/// Every configured input path must exist and be readable.
inline void check_inputs_readable(const RunConfig& cfg) {
    std::vector<std::filesystem::path> paths{cfg.svi_path, cfg.income_path};
    if (cfg.nri_path) paths.push_back(*cfg.nri_path);
    if (cfg.geometry_path) paths.push_back(*cfg.geometry_path);
    for (const auto& p : paths) {
        std::ifstream in(p, std::ios::binary);
        if (!in || std::filesystem::is_directory(p)) throw Error("input not readable: " + p.string());
    }
}

namespace detail {

template <typename Row>
void keep_state(std::vector<Row>& rows, const std::optional<std::string>& state_fips) {
    if (!state_fips) return;
    std::erase_if(rows, [&](const Row& r) { return r.fips.compare(0, 2, *state_fips) != 0; });
}

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline nlohmann::json rejected_json(const std::vector<RejectedRow>& rows) {
    auto j = nlohmann::json::array();
    for (const auto& r : rows)
        j.push_back({{"line", r.line}, {"fips", r.fips}, {"column", r.column}, {"raw", r.raw}, {"reason", r.reason}});
    return j;
}

}  // namespace detail

/// Parses every configured input and joins SVI with income.
inline LoadedInputs load_inputs(const RunConfig& cfg, bool need_nri = false) {
    check_inputs_readable(cfg);
    LoadedInputs in;

    const auto svi_text = read_file(cfg.svi_path);
    const auto income_text = read_file(cfg.income_path);
    in.digests["svi"] = sha256_hex(svi_text);
    in.digests["income"] = sha256_hex(income_text);
    in.svi = parse_svi_table(svi_text, cfg.schema, cfg.delimiter);
    in.income = parse_income_table(income_text, cfg.schema, cfg.delimiter);
    spdlog::info("parsed {} SVI rows ({} rejected), {} income rows ({} rejected, {} aggregate rows excluded)",
                 in.svi.rows.size(), in.svi.rejected.size(), in.income.rows.size(), in.income.rejected.size(),
                 in.income.aggregate_rows_excluded);
    detail::keep_state(in.svi.rows, cfg.state_fips);
    detail::keep_state(in.svi.rejected, cfg.state_fips);
    detail::keep_state(in.income.rows, cfg.state_fips);
    detail::keep_state(in.income.rejected, cfg.state_fips);

    if (cfg.nri_path) {
        const auto text = read_file(*cfg.nri_path);
        in.digests["nri"] = sha256_hex(text);
        in.nri = parse_nri_table(text, cfg.schema, cfg.delimiter);
        detail::keep_state(in.nri->records, cfg.state_fips);
        spdlog::info("parsed {} NRI records", in.nri->records.size());
    } else if (need_nri) {
        throw ConfigError("no NRI input configured (inputs.nri)");
    }
    if (cfg.geometry_path) {
        const auto text = read_file(*cfg.geometry_path);
        in.digests["geometry"] = sha256_hex(text);
        in.geometry = parse_geometry(text, cfg.geometry_fips_property);
        detail::keep_state(*in.geometry, cfg.state_fips);
        spdlog::info("parsed {} county geometries", in.geometry->size());
    }

    in.join = join_counties(in.svi.rows, in.income.rows);
    spdlog::info("joined {} counties ({} SVI-only, {} income-only)", in.join.records.size(),
                 in.join.diagnostics.svi_only.size(), in.join.diagnostics.income_only.size());
    return in;
}

struct PipelineResult {
    ComputeOutput compute;
    std::vector<ClassAssignment> classes;
    std::vector<ResultRow> rows;
};

inline PipelineResult compute_and_classify(const LoadedInputs& in, const RunConfig& cfg) {
    PipelineResult out;
    out.compute = compute_all(in.join.records, cfg.index);
    for (const auto& f : out.compute.unknown_fips) spdlog::warn("analysis FIPS {} has no joined record", f);
    for (const auto& f : out.compute.clamped_fips) spdlog::warn("county {} lies outside the normalization bounds; clamped", f);

    std::map<std::string, double> values;
    for (const auto& r : out.compute.results) values[r.fips] = r.dri;
    out.classes = classify(values, cfg.index.class_count, cfg.labels());
    out.rows = assemble_rows(in.join.records, out.compute.results, out.classes);
    return out;
}

inline nlohmann::json base_manifest(const char* command, const RunConfig& cfg, const LoadedInputs& in) {
    nlohmann::json m;
    m["tool"] = "dri";
    m["version"] = kVersion;
    m["command"] = command;
    m["timestamp"] = detail::utc_timestamp();
    m["config"] = run_config_echo(cfg);
    m["input_digests"] = in.digests;
    m["counts"] = {{"svi_rows", in.svi.rows.size()},
                   {"svi_rejected", in.svi.rejected.size()},
                   {"income_rows", in.income.rows.size()},
                   {"income_rejected", in.income.rejected.size()},
                   {"income_aggregate_rows_excluded", in.income.aggregate_rows_excluded},
                   {"income_filtered_rows", in.income.filtered_rows},
                   {"joined", in.join.records.size()}};
    m["diagnostics"] = {{"svi_only", in.join.diagnostics.svi_only},
                        {"income_only", in.join.diagnostics.income_only},
                        {"svi_rejected", detail::rejected_json(in.svi.rejected)},
                        {"income_rejected", detail::rejected_json(in.income.rejected)}};
    return m;
}

/// `validate`: parse and join, report findings, write nothing.
inline int run_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        cfg.validate();
        check_inputs_readable(cfg);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }

    try {
        const auto in = load_inputs(cfg);
        std::size_t findings = 0;
        const auto rejected = in.svi.rejected.size() + in.income.rejected.size() + (in.nri ? in.nri->rejected.size() : 0);
        out << rejected << " rejected rows\n";
        const auto list_rejected = [&](const char* source, const std::vector<RejectedRow>& rows) {
            for (const auto& r : rows)
                out << "  " << source << " line " << r.line << " fips " << r.fips << ": " << r.reason << " (" << r.column
                    << "=" << r.raw << ")\n";
        };
        list_rejected("svi", in.svi.rejected);
        list_rejected("income", in.income.rejected);
        if (in.nri) list_rejected("nri", in.nri->rejected);
        findings += rejected;

        out << in.join.records.size() << " counties joined\n";
        if (in.income.aggregate_rows_excluded > 0)
            out << in.income.aggregate_rows_excluded << " aggregate income rows excluded\n";
        const auto list = [&](const char* what, const std::vector<std::string>& fips) {
            if (fips.empty()) return;
            out << fips.size() << " " << what << ":";
            for (const auto& f : fips) out << ' ' << f;
            out << '\n';
            findings += fips.size();
        };
        list("FIPS only in SVI table", in.join.diagnostics.svi_only);
        list("FIPS only in income table", in.join.diagnostics.income_only);

        const auto output = compute_all(in.join.records, cfg.index);
        list("analysis FIPS without a joined record", output.unknown_fips);
        list("counties outside the normalization bounds (clamped)", output.clamped_fips);
        if (in.geometry) {
            std::vector<std::string> missing;
            std::map<std::string, bool> have;
            for (const auto& g : *in.geometry) have[g.fips] = true;
            for (const auto& r : output.results)
                if (!have.count(r.fips)) missing.push_back(r.fips);
            list("scored counties without geometry", missing);
        }
        if (in.nri) out << in.nri->records.size() << " NRI records\n";
        return findings == 0 ? kExitOk : kExitFindings;
    } catch (const ParseError& e) {
        out << "finding: " << e.what() << '\n';
    } catch (const MissingColumn& e) {
        out << "finding: " << e.what() << '\n';
    } catch (const DuplicateFips& e) {
        out << "finding: " << e.what() << '\n';
    } catch (const GeometryError& e) {
        out << "finding: " << e.what() << '\n';
    } catch (const EmptyJoin& e) {
        out << "finding: " << e.what() << '\n';
    } catch (const DegenerateDomain& e) {
        out << "finding: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitFindings;
}

/// `compute`: results CSV, GeoJSON when geometry is configured, manifest last.
inline int run_compute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        cfg.validate();
        const auto in = load_inputs(cfg);
        const auto res = compute_and_classify(in, cfg);

        OutputStage stage(cfg.output_dir);
        std::ostringstream csv;
        write_results_csv(res.rows, csv);
        stage.stage(kResultsCsvName, csv.str());

        auto manifest = base_manifest("compute", cfg, in);
        manifest["counts"]["scored"] = res.rows.size();
        manifest["diagnostics"]["unknown_analysis_fips"] = res.compute.unknown_fips;
        manifest["diagnostics"]["clamped"] = res.compute.clamped_fips;
        manifest["normalization"] = {{"p_min", res.compute.context.p_min},
                                     {"p_max", res.compute.context.p_max},
                                     {"i_min", res.compute.context.i_min},
                                     {"i_max", res.compute.context.i_max},
                                     {"domain_size", res.compute.context.domain_size}};
        manifest["outputs"] = {{kResultsCsvName, sha256_hex(csv.str())}};

        if (in.geometry) {
            std::ostringstream geo;
            const auto g = write_geojson(res.rows, *in.geometry, geo);
            for (const auto& f : g.omitted_fips) spdlog::warn("no geometry for {}; feature omitted", f);
            stage.stage(kResultsGeoJsonName, geo.str());
            manifest["diagnostics"]["geometry_missing"] = g.omitted_fips;
            manifest["outputs"][kResultsGeoJsonName] = sha256_hex(geo.str());
        }
        stage.stage(kManifestName, manifest.dump(2) + "\n");
        stage.commit();

        out << "scored " << res.rows.size() << " counties -> " << (cfg.output_dir / kResultsCsvName).string() << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

/// `compare`: DRI against the FEMA NRI, written as comparison.json.
inline int run_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        cfg.validate();
        if (!cfg.nri_path) throw ConfigError("compare needs an NRI table: set inputs.nri in the run config");
        const auto in = load_inputs(cfg, true);
        const auto res = compute_and_classify(in, cfg);

        CompareOptions opts;
        opts.divergence_threshold = cfg.divergence_threshold;
        opts.rating_scale = cfg.nri_rating_scale;
        const auto report = compare_with_nri(res.compute.results, res.classes, in.nri->records, cfg.index.class_count, opts);

        OutputStage stage(cfg.output_dir);
        std::ostringstream json;
        write_comparison_json(report, json);
        stage.stage(kComparisonName, json.str());

        auto manifest = base_manifest("compare", cfg, in);
        manifest["counts"]["scored"] = res.rows.size();
        manifest["counts"]["compared"] = report.n;
        manifest["counts"]["nri_rejected"] = in.nri->rejected.size();
        manifest["outputs"] = {{kComparisonName, sha256_hex(json.str())}};
        stage.stage(kComparisonManifestName, manifest.dump(2) + "\n");
        stage.commit();

        out << "compared " << report.n << " counties; spearman rho = "
            << (report.spearman_rho ? format_double(*report.spearman_rho) : std::string("n/a")) << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

}  // namespace dri

#endif  // DRI_PIPELINE_HPP
