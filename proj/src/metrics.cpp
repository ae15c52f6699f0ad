// Copyright (C) 2025 The tokprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "tokprune/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "tokprune/errors.hpp"
#include "tokprune/rng.hpp"

namespace tokprune {

namespace {

inline double cosine_distance(double similarity) noexcept {
    return std::max(0.0, 1.0 - similarity);
}

/// Partial Fisher-Yates: m distinct entries of `candidates`.
std::vector<std::size_t> sample_without_replacement(std::vector<std::size_t> candidates, std::size_t m,
                                                    CounterRng& rng) {
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.bounded(candidates.size() - i));
        std::swap(candidates[i], candidates[j]);
    }
    candidates.resize(m);
    return candidates;
}

double nearest_distance_to_selection(const FeatureMatrix& features, std::size_t token, const Selection& selection,
                                     std::size_t skip_position) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < selection.indices.size(); ++p) {
        if (p == skip_position) {
            continue;
        }
        best = std::min(best, cosine_distance(pair_similarity(features, token, selection.indices[p])));
    }
    return best;
}

double reference_sum_pool(const FeatureMatrix& features, const Selection& selection, CounterRng& rng) {
    const std::size_t n = features.n_tokens();
    const std::size_t m = selection.indices.size();
    std::vector<char> in_selection(n, 0);
    for (std::size_t i : selection.indices) {
        in_selection[i] = 1;
    }
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < n; ++i) {
        if (!in_selection[i]) {
            candidates.push_back(i);
        }
    }
    if (candidates.size() < m) {
        candidates.resize(n);
        std::iota(candidates.begin(), candidates.end(), std::size_t{0});
    }
    double sum = 0.0;
    for (std::size_t r : sample_without_replacement(std::move(candidates), m, rng)) {
        sum += nearest_distance_to_selection(features, r, selection, m);
    }
    return sum;
}

double reference_sum_bbox(const FeatureMatrix& features, const Selection& selection, CounterRng& rng) {
    const std::size_t d = features.dim();
    std::vector<double> lo(features.row(0).begin(), features.row(0).end());
    std::vector<double> hi = lo;
    for (std::size_t i = 1; i < features.n_tokens(); ++i) {
        const auto r = features.row(i);
        for (std::size_t c = 0; c < d; ++c) {
            lo[c] = std::min(lo[c], r[c]);
            hi[c] = std::max(hi[c], r[c]);
        }
    }
    std::vector<double> point(d);
    double sum = 0.0;
    for (std::size_t s = 0; s < selection.indices.size(); ++s) {
        double sq_norm = 0.0;
        for (int attempt = 0; sq_norm == 0.0; ++attempt) {
            if (attempt == 64) {
                throw DegenerateGeometryError("bounding box of the token pool only contains the origin");
            }
            sq_norm = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                point[c] = lo[c] + (hi[c] - lo[c]) * rng.uniform();
                sq_norm += point[c] * point[c];
            }
        }
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j : selection.indices) {
            best = std::min(best, cosine_distance(cosine_similarity(point, features.row(j))));
        }
        sum += best;
    }
    return sum;
}

}  // namespace

bool dominates(const TradeoffPoint& p, const TradeoffPoint& q) noexcept {
    return p.retention >= q.retention && p.hopkins <= q.hopkins &&
           (p.retention > q.retention || p.hopkins < q.hopkins);
}

double importance_retention(const ImportanceVector& w, const Selection& selection) {
    validate_selection(selection, w.size());
    double total = 0.0;
    for (double v : w.scores()) {
        if (v < 0.0) {
            throw DomainError("importance retention requires non-negative scores");
        }
        total += v;
    }
    if (total == 0.0) {
        throw UndefinedRatioError("importance scores sum to zero");
    }
    double kept = 0.0;
    for (std::size_t i : selection.indices) {
        kept += w[i];
    }
    return kept / total;
}

double hopkins_statistic(const FeatureMatrix& features, const Selection& selection, const HopkinsConfig& cfg) {
    validate_selection(selection, features.n_tokens());
    const std::size_t m = selection.indices.size();
    if (m < 2) {
        throw DomainError("Hopkins statistic needs at least two selected tokens");
    }
    if (cfg.n_trials < 1) {
        throw DomainError("Hopkins statistic needs at least one trial");
    }

    // The within-selection term does not depend on the reference draw.
    double selection_sum = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
        selection_sum += nearest_distance_to_selection(features, selection.indices[p], selection, p);
    }

    double total = 0.0;
    for (std::size_t trial = 0; trial < cfg.n_trials; ++trial) {
        CounterRng rng = CounterRng::derive(cfg.rng_seed, trial);
        const double reference_sum = cfg.reference_mode == ReferenceMode::resample_from_pool
                                         ? reference_sum_pool(features, selection, rng)
                                         : reference_sum_bbox(features, selection, rng);
        const double denom = reference_sum + selection_sum;
        if (denom == 0.0) {
            throw DegenerateGeometryError("all nearest-neighbour distances are zero in Hopkins trial " +
                                          std::to_string(trial));
        }
        total += reference_sum / denom;
    }
    return total / static_cast<double>(cfg.n_trials);
}

AngleHistogram angle_histogram(const FeatureMatrix& features, std::size_t n_bins, std::size_t max_pairs,
                               std::uint64_t seed) {
    const std::size_t n = features.n_tokens();
    if (n < 2) {
        throw DomainError("angle histogram needs at least two tokens");
    }
    if (n_bins < 1) {
        throw DomainError("angle histogram needs at least one bin");
    }
    if (max_pairs < 1) {
        throw DomainError("angle histogram needs max_pairs >= 1");
    }
    AngleHistogram out;
    out.counts.assign(n_bins, 0);
    out.bin_edges_deg.resize(n_bins + 1);
    const double width = 180.0 / static_cast<double>(n_bins);
    for (std::size_t b = 0; b <= n_bins; ++b) {
        out.bin_edges_deg[b] = static_cast<double>(b) * width;
    }
    out.bin_edges_deg[n_bins] = 180.0;

    std::uint64_t obtuse = 0;
    auto add_pair = [&](std::size_t i, std::size_t j) {
        const double sim = pair_similarity(features, i, j);
        double angle = 0.0;
        if (sim == 0.0) {
            angle = 90.0;
        } else {
            angle = std::acos(std::clamp(sim, -1.0, 1.0)) * 180.0 / std::numbers::pi;
        }
        std::size_t bin = static_cast<std::size_t>(std::floor(angle / width));
        // Rounding in angle/width must not push an edge value into the previous bin.
        while (bin + 1 < n_bins && angle >= out.bin_edges_deg[bin + 1]) {
            ++bin;
        }
        while (bin > 0 && angle < out.bin_edges_deg[bin]) {
            --bin;
        }
        ++out.counts[std::min(bin, n_bins - 1)];
        obtuse += sim < 0.0 ? 1 : 0;
        ++out.n_pairs;
    };

    const std::uint64_t all_pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    if (all_pairs <= max_pairs) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                add_pair(i, j);
            }
        }
    } else {
        CounterRng rng(seed);
        for (std::size_t p = 0; p < max_pairs; ++p) {
            const auto i = static_cast<std::size_t>(rng.bounded(n));
            auto j = static_cast<std::size_t>(rng.bounded(n - 1));
            j += j >= i ? 1 : 0;
            add_pair(std::min(i, j), std::max(i, j));
        }
    }
    out.mass_above_90 = static_cast<double>(obtuse) / static_cast<double>(out.n_pairs);
    return out;
}

std::vector<TradeoffPoint> pareto_frontier(const std::vector<TradeoffPoint>& points) {
    std::vector<TradeoffPoint> sorted = points;
    std::stable_sort(sorted.begin(), sorted.end(), [](const TradeoffPoint& a, const TradeoffPoint& b) {
        if (a.hopkins != b.hopkins) {
            return a.hopkins < b.hopkins;
        }
        return a.retention > b.retention;
    });
    // Sweep by ascending hopkins: a point survives iff its retention beats
    // every earlier survivor's.
    std::vector<TradeoffPoint> frontier;
    for (const auto& p : sorted) {
        if (frontier.empty() || p.retention > frontier.back().retention) {
            frontier.push_back(p);
        }
    }
    return frontier;
}

std::string DominanceReport::summary() const {
    return std::to_string(n_dominated) + "/" + std::to_string(n_total) + " points dominated";
}

DominanceReport dominance_report(const std::vector<TradeoffPoint>& frontier_a,
                                 const std::vector<TradeoffPoint>& frontier_b) {
    DominanceReport report;
    report.n_total = frontier_b.size();
    for (const auto& q : frontier_b) {
        const bool hit =
            std::any_of(frontier_a.begin(), frontier_a.end(), [&](const TradeoffPoint& p) { return dominates(p, q); });
        report.dominated.push_back(hit);
        report.n_dominated += hit ? 1 : 0;
    }
    return report;
}

}  // namespace tokprune
