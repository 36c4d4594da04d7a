#ifndef DRI_CLASSIFY_HPP
#define DRI_CLASSIFY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dri/error.hpp"

namespace dri {

struct ClassAssignment {
    std::string fips;
    double value = 0;
    int class_index = 1;  // 1..k
    std::string class_label;
};

/// Ordered labels for five classes, lowest first.
inline std::vector<std::string> five_class_labels() {
    return {"very low", "relatively low", "moderate", "relatively high", "very high"};
}

/// Built-in labels exist only for k = 5; other class counts need caller-supplied labels.
inline std::optional<std::vector<std::string>> default_class_labels(int k) {
    if (k == 5) return five_class_labels();
    return std::nullopt;
}

/// Nearest-rank equal-quantile breaks: break_j = sorted[ceil(j*n/k) - 1] for j = 1..k-1.
template <typename T>
std::vector<T> quantile_breaks(std::span<const T> values, int k) {
    if (k < 2) throw InvalidK(k);
    if (values.empty()) throw InsufficientData("cannot compute quantile breaks of an empty set");
    std::vector<T> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    const std::size_t n = sorted.size();
    const auto kk = static_cast<std::size_t>(k);
    std::vector<T> breaks;
    breaks.reserve(kk - 1);
    for (std::size_t j = 1; j < kk; ++j) {
        const std::size_t rank = (j * n + kk - 1) / kk;  // integer ceil, 1-based
        breaks.push_back(sorted[rank - 1]);
    }
    return breaks;
}

template <typename T>
std::vector<T> quantile_breaks(const std::vector<T>& values, int k) {
    return quantile_breaks(std::span<const T>(values), k);
}

/// 1 + number of breaks strictly below `value`; a value equal to a break stays in the lower class.
template <typename T>
int class_of(const T& value, std::span<const T> breaks) {
    return 1 + static_cast<int>(std::lower_bound(breaks.begin(), breaks.end(), value) - breaks.begin());
}

/// Equal-quantile classification of a FIPS-keyed quantity. Output is FIPS-sorted.
inline std::vector<ClassAssignment> classify(const std::map<std::string, double>& values, int k,
                                             const std::vector<std::string>& labels) {
    if (k < 2) throw InvalidK(k);
    if (labels.size() != static_cast<std::size_t>(k)) throw LabelMismatch(labels.size(), static_cast<std::size_t>(k));
    for (const auto& [fips, v] : values)
        if (!std::isfinite(v)) throw Error("cannot classify non-finite value for FIPS " + fips);
    if (values.empty()) return {};

    std::vector<double> xs;
    xs.reserve(values.size());
    for (const auto& [_, v] : values) xs.push_back(v);
    const auto breaks = quantile_breaks<double>(xs, k);

    std::vector<ClassAssignment> out;
    out.reserve(values.size());
    for (const auto& [fips, v] : values) {
        const int c = class_of<double>(v, breaks);
        out.push_back({fips, v, c, labels[static_cast<std::size_t>(c - 1)]});
    }
    return out;
}

}  // namespace dri

#endif  // DRI_CLASSIFY_HPP
