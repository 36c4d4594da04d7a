#ifndef DRI_COMPARE_HPP
#define DRI_COMPARE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dri/classify.hpp"
#include "dri/error.hpp"
#include "dri/index_core.hpp"
#include "dri/ingest.hpp"

namespace dri {

/// 1-based ranks; tied values share the mean of the ranks they span.
inline std::vector<double> average_ranks(std::span<const double> xs) {
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(xs.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

/// Spearman rank correlation: Pearson correlation of the average-rank vectors.
inline double spearman(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw InsufficientData("spearman: inputs differ in length");
    if (xs.size() < 2) throw InsufficientData("spearman: need at least 2 paired values");
    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);
    const double n = static_cast<double>(rx.size());
    const double mean = (n + 1.0) / 2.0;  // ranks always average to (n + 1) / 2
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        const double dx = rx[i] - mean, dy = ry[i] - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw ConstantInput("spearman: an input has zero rank variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

inline double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    return spearman(std::span<const double>(xs), std::span<const double>(ys));
}

struct CrossTab {
    int k = 0;
    std::vector<std::vector<std::size_t>> counts;  // counts[a_class - 1][b_class - 1]
    std::size_t n = 0;
    std::vector<std::string> a_only;
    std::vector<std::string> b_only;
};

namespace detail {

inline std::map<std::string, int> class_map(std::span<const ClassAssignment> xs, int k, const char* side) {
    std::map<std::string, int> m;
    for (const auto& x : xs) {
        if (x.class_index < 1 || x.class_index > k)
            throw ClassCountMismatch(std::string(side) + " assignment for " + x.fips + " has class " +
                                     std::to_string(x.class_index) + " outside 1.." + std::to_string(k));
        m[x.fips] = x.class_index;
    }
    return m;
}

}  // namespace detail

/// k x k contingency table of (a class, b class) over counties present in both sets.
inline CrossTab cross_tabulate(std::span<const ClassAssignment> a, std::span<const ClassAssignment> b, int k) {
    if (k < 2) throw InvalidK(k);
    const auto am = detail::class_map(a, k, "first");
    const auto bm = detail::class_map(b, k, "second");
    CrossTab t;
    t.k = k;
    t.counts.assign(static_cast<std::size_t>(k), std::vector<std::size_t>(static_cast<std::size_t>(k), 0));
    for (const auto& [fips, ca] : am) {
        auto it = bm.find(fips);
        if (it == bm.end()) {
            t.a_only.push_back(fips);
            continue;
        }
        ++t.counts[static_cast<std::size_t>(ca - 1)][static_cast<std::size_t>(it->second - 1)];
        ++t.n;
    }
    for (const auto& [fips, _] : bm)
        if (!am.count(fips)) t.b_only.push_back(fips);
    return t;
}

struct Divergence {
    std::string fips;
    int a_class = 0;
    int b_class = 0;
    int delta = 0;  // a_class - b_class
};

/// Counties whose classes differ by at least `threshold`, largest |delta| first, then FIPS.
inline std::vector<Divergence> divergence_report(std::span<const ClassAssignment> a, std::span<const ClassAssignment> b,
                                                 int threshold) {
    if (threshold < 1) throw ConfigError("divergence threshold must be >= 1");
    std::map<std::string, int> bm;
    for (const auto& x : b) bm[x.fips] = x.class_index;
    std::vector<Divergence> out;
    for (const auto& x : a) {
        auto it = bm.find(x.fips);
        if (it == bm.end()) continue;
        const int delta = x.class_index - it->second;
        if (std::abs(delta) >= threshold) out.push_back({x.fips, x.class_index, it->second, delta});
    }
    std::sort(out.begin(), out.end(), [](const Divergence& l, const Divergence& r) {
        if (std::abs(l.delta) != std::abs(r.delta)) return std::abs(l.delta) > std::abs(r.delta);
        return l.fips < r.fips;
    });
    return out;
}

/// FEMA rating vocabulary -> ordered class index.
inline std::map<std::string, int> default_nri_rating_scale() {
    return {{"Very Low", 1}, {"Relatively Low", 2}, {"Relatively Moderate", 3}, {"Relatively High", 4}, {"Very High", 5}};
}

enum class NriClassSource { PublishedRating, ScoreQuantiles };

inline const char* to_string(NriClassSource s) {
    return s == NriClassSource::PublishedRating ? "published_rating" : "risk_score_quantiles";
}

struct ComparisonReport {
    std::size_t n = 0;
    std::optional<double> spearman_rho;  // DRI value vs NRI risk score; empty when undefined
    std::string rho_note;                // why rho is empty
    int k = 0;
    CrossTab cross_tab;
    int divergence_threshold = 2;
    std::vector<Divergence> divergences;
    std::vector<std::string> dri_only;
    std::vector<std::string> nri_only;
    NriClassSource nri_class_source = NriClassSource::PublishedRating;
};

struct CompareOptions {
    int divergence_threshold = 2;
    std::map<std::string, int> rating_scale = default_nri_rating_scale();
};

/// DRI classes and values against the NRI. NRI classes come from the published
/// rating when every compared county carries a rating on the scale; otherwise
/// risk scores are classified with the same k-quantile rule as the DRI.
inline ComparisonReport compare_with_nri(std::span<const DriResult> results,
                                         std::span<const ClassAssignment> dri_classes,
                                         std::span<const NriRecord> nri, int k, const CompareOptions& options = {}) {
    ComparisonReport report;
    report.k = k;
    report.divergence_threshold = options.divergence_threshold;

    std::map<std::string, const NriRecord*> nri_by_fips;
    for (const auto& r : nri) nri_by_fips[r.fips] = &r;
    std::map<std::string, double> dri_by_fips;
    for (const auto& r : results) dri_by_fips[r.fips] = r.dri;

    std::vector<double> xs, ys;
    std::vector<const NriRecord*> joined;
    for (const auto& [fips, v] : dri_by_fips) {
        auto it = nri_by_fips.find(fips);
        if (it == nri_by_fips.end()) {
            report.dri_only.push_back(fips);
            continue;
        }
        xs.push_back(v);
        ys.push_back(it->second->risk_score);
        joined.push_back(it->second);
    }
    for (const auto& [fips, _] : nri_by_fips)
        if (!dri_by_fips.count(fips)) report.nri_only.push_back(fips);
    report.n = joined.size();

    if (report.n < 2) {
        report.rho_note = "fewer than 2 counties in common";
    } else {
        try {
            report.spearman_rho = spearman(xs, ys);
        } catch (const ConstantInput& e) {
            report.rho_note = e.what();
        }
    }

    bool use_rating = !joined.empty();
    for (const auto* r : joined) {
        auto it = options.rating_scale.find(r->risk_rating);
        if (it == options.rating_scale.end() || it->second < 1 || it->second > k) {
            use_rating = false;
            break;
        }
    }

    std::vector<ClassAssignment> nri_classes;
    if (use_rating) {
        report.nri_class_source = NriClassSource::PublishedRating;
        for (const auto* r : joined)
            nri_classes.push_back({r->fips, r->risk_score, options.rating_scale.at(r->risk_rating), r->risk_rating});
    } else {
        report.nri_class_source = NriClassSource::ScoreQuantiles;
        std::map<std::string, double> scores;
        for (const auto* r : joined) scores[r->fips] = r->risk_score;
        std::vector<std::string> labels;
        for (int i = 1; i <= k; ++i) labels.push_back("class " + std::to_string(i));
        nri_classes = classify(scores, k, labels);
    }

    std::vector<ClassAssignment> dri_joined;
    for (const auto& c : dri_classes)
        if (nri_by_fips.count(c.fips)) dri_joined.push_back(c);
    report.cross_tab = cross_tabulate(dri_joined, nri_classes, k);
    report.divergences = divergence_report(dri_joined, nri_classes, options.divergence_threshold);
    return report;
}

}  // namespace dri

#endif  // DRI_COMPARE_HPP
