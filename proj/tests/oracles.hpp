// Copyright (C) 2025 The tokprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Slow, straight-line reference computations used only by the tests. None of
// these call into the selector or metric implementations they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "tokprune/core.hpp"
#include "tokprune/rng.hpp"

namespace tokprune::oracle {

inline std::vector<double> random_matrix(std::size_t n, std::size_t d, std::uint64_t seed, double offset = 0.0) {
    CounterRng rng(seed);
    std::vector<double> data(n * d);
    for (double& v : data) {
        v = rng.normal() + offset;
    }
    return data;
}

inline std::vector<double> random_scores(std::size_t n, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<double> w(n);
    for (double& v : w) {
        v = rng.uniform_open();
    }
    return w;
}

inline double cosine(const FeatureMatrix& f, std::size_t i, std::size_t j) {
    long double dot = 0, ni = 0, nj = 0;
    for (std::size_t c = 0; c < f.dim(); ++c) {
        const long double a = f.row(i)[c];
        const long double b = f.row(j)[c];
        dot += a * b;
        ni += a * a;
        nj += b * b;
    }
    return static_cast<double>(dot / (std::sqrt(ni) * std::sqrt(nj)));
}

/// Indices sorted by (-w, index).
inline std::vector<std::size_t> sort_by_importance(const std::vector<double>& w) {
    std::vector<std::pair<double, std::size_t>> keyed;
    for (std::size_t i = 0; i < w.size(); ++i) {
        keyed.emplace_back(-w[i], i);
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<std::size_t> out;
    for (const auto& [neg, i] : keyed) {
        out.push_back(i);
    }
    return out;
}

/// FPS by recomputing every candidate's max similarity from scratch,
/// restricted to `pool`. `sim(i, j)` supplies pairwise similarity.
template <typename Sim>
std::vector<std::size_t> fps(const std::vector<double>& w, std::vector<std::size_t> pool, std::size_t k, Sim&& sim) {
    std::sort(pool.begin(), pool.end());
    std::vector<std::size_t> chosen;
    std::size_t first = pool[0];
    for (std::size_t i : pool) {
        if (w[i] > w[first]) {
            first = i;
        }
    }
    chosen.push_back(first);
    while (chosen.size() < k) {
        std::size_t best = pool.size();
        double best_max = 0.0;
        for (std::size_t p = 0; p < pool.size(); ++p) {
            const std::size_t i = pool[p];
            if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) {
                continue;
            }
            double m = -1.0;
            for (std::size_t j : chosen) {
                m = std::max(m, sim(i, j));
            }
            if (best == pool.size() || m < best_max) {
                best = p;
                best_max = m;
            }
        }
        chosen.push_back(pool[best]);
    }
    return chosen;
}

/// Determinant by Gaussian elimination with partial pivoting.
inline double determinant(std::vector<double> a, std::size_t n) {
    double det = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) {
                piv = r;
            }
        }
        if (a[piv * n + c] == 0.0) {
            return 0.0;
        }
        if (piv != c) {
            for (std::size_t k = 0; k < n; ++k) {
                std::swap(a[c * n + k], a[piv * n + k]);
            }
            det = -det;
        }
        det *= a[c * n + c];
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] / a[c * n + c];
            for (std::size_t k = c; k < n; ++k) {
                a[r * n + k] -= f * a[c * n + k];
            }
        }
    }
    return det;
}

inline double subset_determinant(const std::vector<double>& kernel, std::size_t n, const std::vector<std::size_t>& s) {
    std::vector<double> sub(s.size() * s.size());
    for (std::size_t a = 0; a < s.size(); ++a) {
        for (std::size_t b = 0; b < s.size(); ++b) {
            sub[a * s.size() + b] = kernel[s[a] * n + s[b]];
        }
    }
    return determinant(std::move(sub), s.size());
}

/// Hopkins statistic written out directly from its definition: references
/// resampled from the pool (V minus S when large enough), cosine distance to
/// the nearest neighbour, mean over trials. Draws follow the documented
/// per-trial stream CounterRng::derive(seed, trial).
inline double hopkins_pool(const FeatureMatrix& f, const std::vector<std::size_t>& s, std::uint64_t seed,
                           std::size_t trials) {
    const std::size_t m = s.size();
    auto dist = [&](std::size_t a, std::size_t b) { return std::max(0.0, 1.0 - cosine(f, a, b)); };
    double within = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
        double best = 1e300;
        for (std::size_t q = 0; q < m; ++q) {
            if (q != p) best = std::min(best, dist(s[p], s[q]));
        }
        within += best;
    }
    double total = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        CounterRng rng = CounterRng::derive(seed, t);
        std::vector<std::size_t> pool;
        for (std::size_t i = 0; i < f.n_tokens(); ++i) {
            if (std::find(s.begin(), s.end(), i) == s.end()) pool.push_back(i);
        }
        if (pool.size() < m) {
            pool.resize(f.n_tokens());
            std::iota(pool.begin(), pool.end(), std::size_t{0});
        }
        double reference = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            const std::size_t pick = r + rng.bounded(pool.size() - r);
            std::swap(pool[r], pool[pick]);
            double best = 1e300;
            for (std::size_t j : s) best = std::min(best, dist(pool[r], j));
            reference += best;
        }
        total += reference / (reference + within);
    }
    return total / static_cast<double>(trials);
}

/// Pairwise dominance scan over all ordered pairs.
template <typename Point>
bool dominated_by_any(const Point& q, const std::vector<Point>& pts) {
    for (const auto& p : pts) {
        if (p.retention >= q.retention && p.hopkins <= q.hopkins &&
            (p.retention > q.retention || p.hopkins < q.hopkins)) {
            return true;
        }
    }
    return false;
}

}  // namespace tokprune::oracle
