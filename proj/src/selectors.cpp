// Copyright (C) 2025 The tokprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "tokprune/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tokprune/errors.hpp"

namespace tokprune {

namespace {

void check_inputs(const FeatureMatrix& features, const ImportanceVector& w, const SelectorConfig& cfg) {
    check_paired(features, w);
    validate_config(cfg, features.n_tokens());
}

/// Indices sorted by descending importance, ties toward the lower index.
std::vector<std::size_t> importance_order(const NormalizedImportance& imp) {
    std::vector<std::size_t> order(imp.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return imp[a] > imp[b]; });
    return order;
}

std::size_t argmax_importance(const NormalizedImportance& imp) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < imp.size(); ++i) {
        if (imp[i] > imp[best]) {
            best = i;
        }
    }
    return best;
}

inline double mmr_objective(double lambda, double importance, double max_sim) noexcept {
    return lambda * importance - (1.0 - lambda) * max_sim;
}

/// FPS restricted to `pool` (ascending original indices).
Selection fps_over_pool(const FeatureMatrix& features,
                        const NormalizedImportance& imp,
                        std::span<const std::size_t> pool,
                        std::size_t k) {
    Selection out;
    out.indices.reserve(k);
    std::vector<double> scores;
    scores.reserve(k);

    std::size_t first = 0;
    for (std::size_t p = 1; p < pool.size(); ++p) {
        if (imp[pool[p]] > imp[pool[first]]) {
            first = p;
        }
    }
    std::vector<double> max_sim(pool.size(), -1.0);
    std::vector<char> taken(pool.size(), 0);

    std::size_t pick = first;
    scores.push_back(imp[pool[first]]);
    for (std::size_t t = 0; t < k; ++t) {
        if (t > 0) {
            pick = pool.size();
            for (std::size_t p = 0; p < pool.size(); ++p) {
                if (!taken[p] && (pick == pool.size() || max_sim[p] < max_sim[pick])) {
                    pick = p;
                }
            }
            scores.push_back(1.0 - max_sim[pick]);
        }
        taken[pick] = 1;
        out.indices.push_back(pool[pick]);
        for (std::size_t p = 0; p < pool.size(); ++p) {
            max_sim[p] = std::max(max_sim[p], pair_similarity(features, pool[p], pool[pick]));
        }
    }
    out.step_scores = std::move(scores);
    return out;
}

/**
 * Greedy MAP with incremental Cholesky factors. `kernel_row(j, out)` fills
 * L[j, :]; `diag` holds L_ii. Memory is O(kN) for the factor rows.
 */
template <typename KernelRow>
DppTrace greedy_map_impl(std::size_t n, std::size_t k, std::vector<double> cond_var, KernelRow&& kernel_row) {
    DppTrace trace;
    std::vector<char> taken(n, 0);
    std::vector<std::vector<double>> factors;
    factors.reserve(k);
    std::vector<double> l_row(n);

    auto check_psd = [&]() {
        for (std::size_t i = 0; i < n; ++i) {
            if (!taken[i] && cond_var[i] < -dpp_jitter) {
                throw KernelConditioningError("DPP kernel is not positive semi-definite: conditional variance " +
                                              std::to_string(cond_var[i]) + " at token " + std::to_string(i));
            }
        }
    };
    check_psd();

    for (std::size_t t = 0; t < k; ++t) {
        std::size_t best = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!taken[i] && (best == n || cond_var[i] > cond_var[best])) {
                best = i;
            }
        }
        if (cond_var[best] <= dpp_exhausted_gain) {
            break;
        }
        taken[best] = 1;
        trace.order.push_back(best);
        trace.gains.push_back(cond_var[best]);
        ++trace.greedy_steps;
        if (t + 1 == k) {
            break;
        }

        kernel_row(best, std::span<double>(l_row));
        const double pivot = std::sqrt(cond_var[best]);
        std::vector<double> e(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) {
                continue;
            }
            double acc = l_row[i];
            for (const auto& c : factors) {
                acc -= c[best] * c[i];
            }
            e[i] = acc / pivot;
            cond_var[i] -= e[i] * e[i];
        }
        factors.push_back(std::move(e));
        check_psd();
    }
    return trace;
}

}  // namespace

void validate_config(const SelectorConfig& cfg, std::size_t n_tokens) {
    if (cfg.k < 1 || cfg.k > n_tokens) {
        throw BudgetError("budget k=" + std::to_string(cfg.k) + " must be in [1, " + std::to_string(n_tokens) + "]");
    }
    if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) {
        throw DomainError("lambda must be in [0, 1]");
    }
    if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) {
        throw DomainError("epsilon must be a positive finite number");
    }
    if (!(cfg.dpp_quality_floor >= 0.0) || !std::isfinite(cfg.dpp_quality_floor)) {
        throw DomainError("dpp quality floor must be a non-negative finite number");
    }
}

Selection select_greedy_importance(const FeatureMatrix& features, const ImportanceVector& w, const SelectorConfig& cfg) {
    check_inputs(features, w, cfg);
    const auto order = importance_order(normalize_importance(w, cfg.epsilon));
    Selection out;
    out.method = Method::importance;
    out.indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cfg.k));
    std::vector<double> scores;
    for (std::size_t i : out.indices) {
        scores.push_back(w[i]);
    }
    out.step_scores = std::move(scores);
    return out;
}

Selection select_fps(const FeatureMatrix& features, const ImportanceVector& w, const SelectorConfig& cfg) {
    check_inputs(features, w, cfg);
    std::vector<std::size_t> pool(features.n_tokens());
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    Selection out = fps_over_pool(features, normalize_importance(w, cfg.epsilon), pool, cfg.k);
    out.method = Method::fps;
    return out;
}

std::size_t hybrid_pool_size(std::size_t n_tokens, std::size_t k, double lambda) noexcept {
    const double p = std::round(static_cast<double>(k) +
                                (1.0 - lambda) * (static_cast<double>(n_tokens) - static_cast<double>(k)));
    return std::clamp(static_cast<std::size_t>(std::max(p, 0.0)), k, n_tokens);
}

Selection select_naive_hybrid(const FeatureMatrix& features, const ImportanceVector& w, const SelectorConfig& cfg) {
    check_inputs(features, w, cfg);
    const auto imp = normalize_importance(w, cfg.epsilon);
    const auto order = importance_order(imp);
    std::vector<std::size_t> pool(order.begin(),
                                  order.begin() + static_cast<std::ptrdiff_t>(
                                                      hybrid_pool_size(features.n_tokens(), cfg.k, cfg.lambda)));
    std::sort(pool.begin(), pool.end());
    Selection out = fps_over_pool(features, imp, pool, cfg.k);
    out.method = Method::hybrid;
    out.lambda = cfg.lambda;
    return out;
}

Selection select_mmr(const FeatureMatrix& features, const ImportanceVector& w, const SelectorConfig& cfg,
                     MmrDiagnostics& diagnostics) {
    check_inputs(features, w, cfg);
    const std::size_t n = features.n_tokens();
    const auto imp = normalize_importance(w, cfg.epsilon);
    const double lambda = cfg.lambda;

    Selection out;
    out.method = Method::mmr;
    out.lambda = lambda;
    out.indices.reserve(cfg.k);
    std::vector<double> scores;
    scores.reserve(cfg.k);

    MaxSimState state(n);
    std::vector<double> sim_row(n);
    for (std::size_t t = 0; t < cfg.k; ++t) {
        std::size_t best = 0;
        double best_score = 0.0;
        if (t == 0) {
            best = argmax_importance(imp);
            best_score = mmr_objective(lambda, imp[best], state.max_similarity()[best]);
        } else {
            const auto m = state.max_similarity();
            best = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (state.is_selected(i)) {
                    continue;
                }
                const double score = mmr_objective(lambda, imp[i], m[i]);
                if (best == n || score > best_score) {
                    best = i;
                    best_score = score;
                }
            }
        }
        out.indices.push_back(best);
        scores.push_back(best_score);
        similarity_row_into(features, best, sim_row);
        state.absorb(best, sim_row);
    }
    diagnostics.negative_similarities = state.negative_similarity_count();
    out.step_scores = std::move(scores);
    return out;
}

Selection select_mmr(const FeatureMatrix& features, const ImportanceVector& w, const SelectorConfig& cfg) {
    MmrDiagnostics unused;
    return select_mmr(features, w, cfg, unused);
}

Selection select_mmr_naive(const FeatureMatrix& features, const ImportanceVector& w, const SelectorConfig& cfg) {
    check_inputs(features, w, cfg);
    const std::size_t n = features.n_tokens();
    const auto imp = normalize_importance(w, cfg.epsilon);
    const double lambda = cfg.lambda;

    std::vector<double> table(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            table[i * n + j] = pair_similarity(features, i, j);
        }
    }

    Selection out;
    out.method = Method::mmr_naive;
    out.lambda = lambda;
    std::vector<double> scores;
    std::vector<char> taken(n, 0);
    for (std::size_t t = 0; t < cfg.k; ++t) {
        std::size_t best = n;
        double best_score = 0.0;
        if (t == 0) {
            best = argmax_importance(imp);
            best_score = mmr_objective(lambda, imp[best], -1.0);
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                if (taken[i]) {
                    continue;
                }
                double max_sim = -1.0;
                for (std::size_t j : out.indices) {
                    max_sim = std::max(max_sim, table[i * n + j]);
                }
                const double score = mmr_objective(lambda, imp[i], max_sim);
                if (best == n || score > best_score) {
                    best = i;
                    best_score = score;
                }
            }
        }
        taken[best] = 1;
        out.indices.push_back(best);
        scores.push_back(best_score);
    }
    out.step_scores = std::move(scores);
    return out;
}

DppTrace dpp_greedy_map(std::span<const double> kernel, std::size_t n, std::size_t k) {
    if (kernel.size() != n * n) {
        throw DomainError("kernel must be " + std::to_string(n) + " x " + std::to_string(n));
    }
    if (k < 1 || k > n) {
        throw BudgetError("budget k=" + std::to_string(k) + " must be in [1, " + std::to_string(n) + "]");
    }
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] = kernel[i * n + i];
    }
    return greedy_map_impl(n, k, std::move(diag), [&](std::size_t j, std::span<double> out) {
        std::copy_n(kernel.begin() + static_cast<std::ptrdiff_t>(j * n), n, out.begin());
    });
}

Selection select_dpp(const FeatureMatrix& features, const ImportanceVector& w, const SelectorConfig& cfg) {
    check_inputs(features, w, cfg);
    const std::size_t n = features.n_tokens();
    const auto imp = normalize_importance(w, cfg.epsilon);
    std::vector<double> quality(n);
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        quality[i] = imp[i] + cfg.dpp_quality_floor;
        diag[i] = quality[i] * quality[i] * pair_similarity(features, i, i);
    }
    DppTrace trace = greedy_map_impl(n, cfg.k, diag, [&](std::size_t j, std::span<double> out) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = quality[j] * quality[i] * pair_similarity(features, j, i);
        }
    });

    Selection out;
    out.method = Method::dpp;
    out.indices = std::move(trace.order);
    std::vector<double> scores = std::move(trace.gains);
    if (out.indices.size() < cfg.k) {
        // Kernel rank exhausted (rank <= dim); fill the budget by importance.
        std::vector<char> taken(n, 0);
        for (std::size_t i : out.indices) {
            taken[i] = 1;
        }
        for (std::size_t i : importance_order(imp)) {
            if (out.indices.size() == cfg.k) {
                break;
            }
            if (!taken[i]) {
                out.indices.push_back(i);
                scores.push_back(0.0);
            }
        }
    }
    out.step_scores = std::move(scores);
    return out;
}

Selection run_selector(Method method, const FeatureMatrix& features, const ImportanceVector& w,
                       const SelectorConfig& cfg) {
    switch (method) {
    case Method::importance:
        return select_greedy_importance(features, w, cfg);
    case Method::fps:
        return select_fps(features, w, cfg);
    case Method::hybrid:
        return select_naive_hybrid(features, w, cfg);
    case Method::mmr:
        return select_mmr(features, w, cfg);
    case Method::mmr_naive:
        return select_mmr_naive(features, w, cfg);
    case Method::dpp:
        return select_dpp(features, w, cfg);
    }
    throw DomainError("unknown selection method");
}

}  // namespace tokprune
