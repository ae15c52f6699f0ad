// Copyright (C) 2025 The tokprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tokprune/core.hpp"

namespace tokprune {

/// One point on the (Hopkins, retention) plane.
struct TradeoffPoint {
    Method method = Method::mmr;
    std::optional<double> lambda;
    double hopkins = 0.0;
    double retention = 0.0;

    friend bool operator==(const TradeoffPoint&, const TradeoffPoint&) = default;
};

/// p dominates q: p keeps at least as much importance with at most as much
/// clustering, strictly better in one of the two.
bool dominates(const TradeoffPoint& p, const TradeoffPoint& q) noexcept;

enum class ReferenceMode { resample_from_pool, uniform_in_bbox };

struct HopkinsConfig {
    std::uint64_t rng_seed = 0;
    ReferenceMode reference_mode = ReferenceMode::resample_from_pool;
    std::size_t n_trials = 16;
};

/// Fraction of the total importance mass kept by the selection. Requires
/// non-negative scores (DomainError) with a positive sum (UndefinedRatioError).
double importance_retention(const ImportanceVector& w, const Selection& selection);

/**
 * Hopkins statistic of the selected tokens under cosine distance, averaged
 * over `n_trials` reference draws. Trial t draws its reference set from the
 * stream CounterRng::derive(rng_seed, t), so the result does not depend on
 * evaluation order.
 *
 * resample_from_pool draws m = |S| distinct tokens from V \ S when that set
 * has at least m tokens, otherwise from all of V. uniform_in_bbox draws m
 * points uniformly in the per-dimension bounding box of V.
 */
double hopkins_statistic(const FeatureMatrix& features, const Selection& selection, const HopkinsConfig& cfg);

struct AngleHistogram {
    std::vector<double> bin_edges_deg;  // n_bins + 1 edges over [0, 180]
    std::vector<std::uint64_t> counts;  // left-closed bins, 180 lands in the last
    std::uint64_t n_pairs = 0;
    double mass_above_90 = 0.0;  // fraction of pairs with strictly negative similarity
};

/// Histogram of pairwise angles. When N(N-1)/2 exceeds max_pairs, max_pairs
/// pairs are drawn uniformly (with replacement) using `seed`.
AngleHistogram angle_histogram(const FeatureMatrix& features, std::size_t n_bins = 60,
                               std::size_t max_pairs = 2'000'000, std::uint64_t seed = 0);

/// Non-dominated points sorted by ascending hopkins (descending retention on
/// ties); points with identical coordinates are collapsed to the first one.
std::vector<TradeoffPoint> pareto_frontier(const std::vector<TradeoffPoint>& points);

struct DominanceReport {
    std::vector<bool> dominated;  // per point of b: dominated by some point of a
    std::size_t n_dominated = 0;
    std::size_t n_total = 0;
    double fraction() const noexcept {
        return n_total == 0 ? 0.0 : static_cast<double>(n_dominated) / static_cast<double>(n_total);
    }
    std::string summary() const;
};

DominanceReport dominance_report(const std::vector<TradeoffPoint>& frontier_a,
                                 const std::vector<TradeoffPoint>& frontier_b);

}  // namespace tokprune
