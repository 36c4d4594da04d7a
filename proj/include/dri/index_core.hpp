#ifndef DRI_INDEX_CORE_HPP
#define DRI_INDEX_CORE_HPP

#include <algorithm>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dri/error.hpp"
#include "dri/ingest.hpp"

namespace dri {

enum class NormalizationDomain { FullDataset, AnalysisSubset };

/// Coefficient printed in the published formula. Three terms times 0.33 tops out at 0.99.
inline constexpr double kPaperLiteralWeight = 0.33;
/// Coefficient for which the index spans exactly [0, 1].
inline constexpr double kEqualWeight = 1.0 / 3.0;

struct IndexConfig {
    double weight = kEqualWeight;
    int class_count = 5;
    NormalizationDomain domain = NormalizationDomain::FullDataset;
    /// Counties to score (e.g. a storm-path subset). Empty or absent scores every record.
    std::optional<std::vector<std::string>> analysis_fips;

    void validate() const {
        if (!(weight > 0.0)) throw ConfigError("weight must be > 0");
        if (class_count < 2) throw InvalidK(class_count);
        if (domain == NormalizationDomain::AnalysisSubset && (!analysis_fips || analysis_fips->empty()))
            throw ConfigError("analysis-subset normalization requires a non-empty analysis FIPS list");
    }

    bool has_subset() const { return analysis_fips && !analysis_fips->empty(); }
};

struct NormalizationContext {
    double p_min = 0, p_max = 0;
    double i_min = 0, i_max = 0;
    std::size_t domain_size = 0;
};

struct DriResult {
    std::string fips;
    double pop_norm = 0;
    double income_norm_inverted = 0;  // 1 - normalized income
    double svi = 0;
    double dri = 0;
    double dri_complement = 0;  // 3 * weight - dri
    bool clamped = false;       // an input fell outside the normalization bounds
};

struct ComputeOutput {
    NormalizationContext context;
    std::vector<DriResult> results;
    std::vector<std::string> unknown_fips;  // requested in analysis_fips but absent from the records
    std::vector<std::string> clamped_fips;
};

namespace detail {

struct Normalized {
    double value;
    bool clamped;
};

inline Normalized normalize(double value, double lo, double hi) {
    if (!(lo < hi)) throw DegenerateDomain("normalization bounds are degenerate (min >= max)");
    if (value <= lo) return {0.0, value < lo};
    if (value >= hi) return {1.0, value > hi};
    return {(value - lo) / (hi - lo), false};
}

}  // namespace detail

/// (value - lo) / (hi - lo), clamped to [0, 1].
inline double min_max_normalize(double value, double lo, double hi) { return detail::normalize(value, lo, hi).value; }

/// Population and income bounds over the configured normalization domain.
inline NormalizationContext build_context(std::span<const CountyRecord> records, const IndexConfig& config) {
    if (records.empty()) throw DegenerateDomain("no records to normalize over");
    std::set<std::string> subset;
    const bool use_subset = config.domain == NormalizationDomain::AnalysisSubset;
    if (use_subset) {
        if (!config.has_subset())
            throw ConfigError("analysis-subset normalization requires a non-empty analysis FIPS list");
        subset.insert(config.analysis_fips->begin(), config.analysis_fips->end());
    }

    NormalizationContext ctx;
    bool first = true;
    for (const auto& r : records) {
        if (use_subset && !subset.count(r.fips)) continue;
        const auto p = static_cast<double>(r.population);
        if (first) {
            ctx.p_min = ctx.p_max = p;
            ctx.i_min = ctx.i_max = r.income;
            first = false;
        } else {
            ctx.p_min = std::min(ctx.p_min, p);
            ctx.p_max = std::max(ctx.p_max, p);
            ctx.i_min = std::min(ctx.i_min, r.income);
            ctx.i_max = std::max(ctx.i_max, r.income);
        }
        ++ctx.domain_size;
    }
    if (ctx.domain_size < 2)
        throw DegenerateDomain("normalization domain holds " + std::to_string(ctx.domain_size) +
                               " counties; at least 2 are required");
    if (ctx.p_min == ctx.p_max) throw DegenerateDomain("every county in the domain has the same population");
    if (ctx.i_min == ctx.i_max) throw DegenerateDomain("every county in the domain has the same income");
    return ctx;
}

/// weight * (normalized population + (1 - normalized income) + SVI)
inline DriResult compute_dri(const CountyRecord& record, const NormalizationContext& ctx, const IndexConfig& config) {
    const auto pop = detail::normalize(static_cast<double>(record.population), ctx.p_min, ctx.p_max);
    const auto inc = detail::normalize(record.income, ctx.i_min, ctx.i_max);

    DriResult r;
    r.fips = record.fips;
    r.pop_norm = pop.value;
    r.income_norm_inverted = 1.0 - inc.value;
    r.svi = record.svi;
    r.dri = config.weight * (r.pop_norm + r.income_norm_inverted + r.svi);
    r.dri_complement = 3.0 * config.weight - r.dri;
    r.clamped = pop.clamped || inc.clamped;
    return r;
}

inline ComputeOutput compute_all(std::span<const CountyRecord> records, const IndexConfig& config) {
    config.validate();
    ComputeOutput out;
    out.context = build_context(records, config);

    std::optional<std::set<std::string>> subset;
    if (config.has_subset()) {
        subset.emplace(config.analysis_fips->begin(), config.analysis_fips->end());
        std::set<std::string> known;
        for (const auto& r : records) known.insert(r.fips);
        for (const auto& fips : *subset)
            if (!known.count(fips)) out.unknown_fips.push_back(fips);
    }

    for (const auto& r : records) {
        if (subset && !subset->count(r.fips)) continue;
        out.results.push_back(compute_dri(r, out.context, config));
        if (out.results.back().clamped) out.clamped_fips.push_back(r.fips);
    }
    std::sort(out.results.begin(), out.results.end(),
              [](const DriResult& a, const DriResult& b) { return a.fips < b.fips; });
    std::sort(out.clamped_fips.begin(), out.clamped_fips.end());
    return out;
}

}  // namespace dri

#endif  // DRI_INDEX_CORE_HPP
