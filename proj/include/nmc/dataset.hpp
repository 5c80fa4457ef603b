#ifndef NMC_DATASET_HPP
#define NMC_DATASET_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "nmc/errors.hpp"

namespace nmc {

enum class BinScheme { fixed_width, quantile };

// n x m categorical sample matrix. Category codes are dense 0-based per
// variable; unused codes are pruned away at construction and the original
// labels kept for reporting. numeric_level[i][c] carries the numeric value
// the code stands for (original integer label, or bin mean after
// discretization) and feeds the regularized solver.
struct Dataset {
    int n = 0;
    int m = 0;
    std::vector<std::vector<int>> values;            // [variable][sample]
    std::vector<int> alphabet;                       // pruned |X_i|
    std::vector<std::vector<std::string>> labels;    // code -> original label
    std::vector<std::vector<double>> numeric_level;  // code -> numeric value
    std::vector<std::string> names;                  // variable names (may be empty)
    std::vector<bool> degenerate;                    // |X_i| == 1 after pruning

    bool any_degenerate() const {
        return std::any_of(degenerate.begin(), degenerate.end(), [](bool d) { return d; });
    }
};

// Builds a Dataset from raw integer categories, pruning unused labels per
// variable. Labels are the original integers; numeric levels equal them.
inline Dataset make_dataset(const std::vector<std::vector<long long>>& raw,
                            std::vector<std::string> names = {}) {
    Dataset d;
    d.n = static_cast<int>(raw.size());
    if (d.n == 0) throw invalid_input("dataset: no variables");
    d.m = static_cast<int>(raw[0].size());
    if (d.m < 1) throw invalid_input("dataset: no samples");
    d.values.resize(d.n);
    d.alphabet.resize(d.n);
    d.labels.resize(d.n);
    d.numeric_level.resize(d.n);
    d.degenerate.resize(d.n);
    d.names = std::move(names);
    for (int i = 0; i < d.n; ++i) {
        if (static_cast<int>(raw[i].size()) != d.m)
            throw invalid_input("dataset: ragged sample matrix at variable " + std::to_string(i + 1));
        std::map<long long, int> remap;
        for (long long v : raw[i]) remap.emplace(v, 0);
        int code = 0;
        for (auto& [label, c] : remap) {
            c = code++;
            d.labels[i].push_back(std::to_string(label));
            d.numeric_level[i].push_back(static_cast<double>(label));
        }
        d.alphabet[i] = code;
        d.degenerate[i] = (code == 1);
        d.values[i].reserve(d.m);
        for (long long v : raw[i]) d.values[i].push_back(remap[v]);
    }
    return d;
}

// Per-variable occurrence counts.
inline std::vector<std::vector<int>> category_counts(const Dataset& d) {
    std::vector<std::vector<int>> counts(d.n);
    for (int i = 0; i < d.n; ++i) {
        counts[i].assign(d.alphabet[i], 0);
        for (int v : d.values[i]) ++counts[i][v];
    }
    return counts;
}

// Minimum marginal probability over all variables and symbols (delta).
inline double marginal_floor(const Dataset& d) {
    auto counts = category_counts(d);
    int min_count = d.m;
    for (const auto& ci : counts)
        for (int c : ci) min_count = std::min(min_count, c);
    return static_cast<double>(min_count) / d.m;
}

namespace detail {

// Quantile bins by rank with ties split in stable sample order, so every bin
// holds floor(m/bins) or ceil(m/bins) samples. A constant column collapses to
// one bin instead of being rank-split (rank order carries no information there).
inline std::vector<int> quantile_bin_column(const std::vector<double>& col, int bins) {
    const int m = static_cast<int>(col.size());
    if (col.front() == col.back() &&
        std::all_of(col.begin(), col.end(), [&](double v) { return v == col.front(); }))
        return std::vector<int>(m, 0);
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return col[a] < col[b]; });
    std::vector<int> out(m);
    for (int rank = 0; rank < m; ++rank)
        out[order[rank]] = static_cast<int>((static_cast<std::int64_t>(rank) * bins) / m);
    return out;
}

inline std::vector<int> fixed_width_bin_column(const std::vector<double>& col, int bins) {
    const auto [lo_it, hi_it] = std::minmax_element(col.begin(), col.end());
    const double lo = *lo_it, hi = *hi_it;
    std::vector<int> out(col.size());
    if (hi == lo) return out; // constant column, single bin
    const double width = (hi - lo) / bins;
    for (std::size_t s = 0; s < col.size(); ++s) {
        int b = static_cast<int>((col[s] - lo) / width);
        out[s] = std::clamp(b, 0, bins - 1);
    }
    return out;
}

} // namespace detail

// Bins each variable of an n x m real matrix independently. Empty bins are
// pruned; numeric levels are set to the within-bin sample means so the
// regularized solver sees the original scale. Constant columns end up with a
// single category and a degenerate flag.
inline Dataset discretize(const std::vector<std::vector<double>>& real_data, int bins,
                          BinScheme scheme, std::vector<std::string> names = {}) {
    if (bins < 2) throw invalid_input("discretize: bins must be >= 2");
    const int n = static_cast<int>(real_data.size());
    if (n == 0) throw invalid_input("discretize: no variables");
    const int m = static_cast<int>(real_data[0].size());
    if (m < 1) throw invalid_input("discretize: no samples");
    std::vector<std::vector<long long>> raw(n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(real_data[i].size()) != m)
            throw invalid_input("discretize: ragged matrix at variable " + std::to_string(i + 1));
        for (double v : real_data[i])
            if (!std::isfinite(v))
                throw invalid_input("discretize: non-finite value in variable " + std::to_string(i + 1));
        std::vector<int> binned = scheme == BinScheme::quantile
                                      ? detail::quantile_bin_column(real_data[i], bins)
                                      : detail::fixed_width_bin_column(real_data[i], bins);
        raw[i].assign(binned.begin(), binned.end());
    }
    Dataset d = make_dataset(raw, std::move(names));
    // replace numeric levels (bin indices) with per-bin means of the raw values
    for (int i = 0; i < d.n; ++i) {
        std::vector<double> sum(d.alphabet[i], 0.0);
        std::vector<int> cnt(d.alphabet[i], 0);
        for (int s = 0; s < d.m; ++s) {
            sum[d.values[i][s]] += real_data[i][s];
            ++cnt[d.values[i][s]];
        }
        for (int c = 0; c < d.alphabet[i]; ++c) d.numeric_level[i][c] = sum[c] / cnt[c];
    }
    return d;
}

// Restricts a dataset to a subset of variables (block sub-problems).
inline Dataset subset_variables(const Dataset& d, const std::vector<int>& vars) {
    Dataset out;
    out.n = static_cast<int>(vars.size());
    out.m = d.m;
    for (int v : vars) {
        out.values.push_back(d.values[v]);
        out.alphabet.push_back(d.alphabet[v]);
        out.labels.push_back(d.labels[v]);
        out.numeric_level.push_back(d.numeric_level[v]);
        out.degenerate.push_back(d.degenerate[v]);
        out.names.push_back(d.names.empty() ? std::string() : d.names[v]);
    }
    return out;
}

} // namespace nmc

#endif
