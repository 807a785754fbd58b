#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "csi/errors.hpp"

namespace csi {

// Correlation estimates carry a degeneracy flag instead of ever producing
// NaN: zero variance in either series yields {0, true}.
struct Correlation {
    double value = 0.0;
    bool degenerate = false;
};

inline Correlation pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size())
        throw ShapeError("pearson needs series of equal length");
    if (xs.size() < 2) throw ShapeError("pearson needs at least 2 points");
    double n = static_cast<double>(xs.size());
    double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double dx = xs[i] - mean_x;
        double dy = ys[i] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return {0.0, true};
    return {sxy / std::sqrt(sxx * syy), false};
}

// Positions 1..n, ties sharing the average of the positions they would span.
inline std::vector<double> average_ranks(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size(), 0.0);
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

inline Correlation spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size())
        throw ShapeError("spearman needs series of equal length");
    if (xs.size() < 2) throw ShapeError("spearman needs at least 2 points");
    return pearson(average_ranks(xs), average_ranks(ys));
}

}  // namespace csi
