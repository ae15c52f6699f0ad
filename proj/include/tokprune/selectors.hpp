// Copyright (C) 2025 The tokprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tokprune/core.hpp"

namespace tokprune {

struct SelectorConfig {
    std::size_t k = 1;
    double lambda = 0.5;
    double epsilon = default_epsilon;
    double dpp_quality_floor = 0.01;
    std::uint64_t rng_seed = 0;
};

/// Throws BudgetError unless 1 <= k <= n_tokens, DomainError for lambda
/// outside [0, 1], epsilon <= 0 or a negative DPP floor.
void validate_config(const SelectorConfig& cfg, std::size_t n_tokens);

/*
 * Every selector ranks tokens by normalized importance (order-preserving
 * w.r.t. the raw scores) and breaks every tie toward the lower index. That
 * makes the MMR endpoints coincide exactly with greedy importance (lambda=1)
 * and FPS (lambda=0).
 */

/// Top-K by importance, descending. step_scores hold the raw scores.
Selection select_greedy_importance(const FeatureMatrix& features, const ImportanceVector& w, const SelectorConfig& cfg);

/// Farthest point sampling in cosine distance, seeded with the most important
/// token. step_scores hold Imp of the seed then the cosine distance
/// (1 - max similarity) of each later pick to the selected set.
Selection select_fps(const FeatureMatrix& features, const ImportanceVector& w, const SelectorConfig& cfg);

/// Keep the top P = round(K + (1 - lambda)(N - K)) tokens by importance, then
/// run FPS inside that pool.
Selection select_naive_hybrid(const FeatureMatrix& features, const ImportanceVector& w, const SelectorConfig& cfg);

/// Pool size used by select_naive_hybrid.
std::size_t hybrid_pool_size(std::size_t n_tokens, std::size_t k, double lambda) noexcept;

/**
 * Maximal marginal relevance with the O(KN) running max-similarity update.
 * step t picks argmax over unselected tokens of
 *     lambda * Imp(i) - (1 - lambda) * m_i
 * where m_i starts at -1 and absorbs the similarity row of each pick. The
 * first pick is argmax Imp. step_scores hold the winning objective value
 * (for step 1, evaluated with m = -1). Only one length-N similarity row is
 * held at any time.
 */
Selection select_mmr(const FeatureMatrix& features, const ImportanceVector& w, const SelectorConfig& cfg);

struct MmrDiagnostics {
    std::size_t negative_similarities = 0;
};
Selection select_mmr(const FeatureMatrix& features, const ImportanceVector& w, const SelectorConfig& cfg,
                     MmrDiagnostics& diagnostics);

/// Reference MMR: recomputes max_{j in S} Sim(i, j) from a precomputed N x N
/// similarity table at every step (O(K^2 N) after the table). Bit-identical
/// output to select_mmr.
Selection select_mmr_naive(const FeatureMatrix& features, const ImportanceVector& w, const SelectorConfig& cfg);

/**
 * Greedy MAP for a DPP with kernel L = diag(q) S diag(q), S the cosine
 * similarity matrix and q_i = Imp(i) + dpp_quality_floor.
 * step_scores hold the conditional variance d_i^2 = det(L_{S+i}) / det(L_S)
 * of each pick (the log-det gain is its logarithm). Once every remaining
 * variance is <= 1e-12 the rest of the budget is filled by descending
 * importance with a step score of 0.
 */
Selection select_dpp(const FeatureMatrix& features, const ImportanceVector& w, const SelectorConfig& cfg);

struct DppTrace {
    std::vector<std::size_t> order;
    std::vector<double> gains;  // conditional variances of greedy picks
    std::size_t greedy_steps = 0;  // picks made before the kernel was exhausted
};

/// Greedy MAP over an explicit symmetric PSD kernel (row-major n x n). Stops
/// once every remaining conditional variance is <= 1e-12; the caller pads.
/// Throws KernelConditioningError when a variance drops below -1e-8.
DppTrace dpp_greedy_map(std::span<const double> kernel, std::size_t n, std::size_t k);

inline constexpr double dpp_exhausted_gain = 1e-12;
inline constexpr double dpp_jitter = 1e-8;

/// Dispatch on method tag. Uses cfg.lambda only for lambda methods.
Selection run_selector(Method method, const FeatureMatrix& features, const ImportanceVector& w,
                       const SelectorConfig& cfg);

}  // namespace tokprune
