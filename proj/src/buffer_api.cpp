// Copyright (C) 2025 The tokprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "tokprune/buffer_api.hpp"

#include <string>

#include "tokprune/errors.hpp"
#include "tokprune/metrics.hpp"
#include "tokprune/selectors.hpp"

namespace tokprune {

namespace {

template <typename T>
FeatureMatrix widen(ArrayView2d<T> view) {
    if (view.data.size() != view.n_tokens * view.dim) {
        throw DomainError("buffer holds " + std::to_string(view.data.size()) + " values but shape is " +
                          std::to_string(view.n_tokens) + " x " + std::to_string(view.dim));
    }
    return FeatureMatrix(view.n_tokens, view.dim, std::vector<double>(view.data.begin(), view.data.end()));
}

template <typename T>
ImportanceVector widen(std::span<const T> values) {
    return ImportanceVector(std::vector<double>(values.begin(), values.end()));
}

BoundSelection select_impl(const FeatureMatrix& features, const ImportanceVector& w, std::string_view method_name,
                           std::size_t k, double lambda, std::uint64_t seed) {
    const auto method = parse_method(method_name);
    if (!method) {
        throw DomainError("unknown method '" + std::string(method_name) + "'");
    }
    SelectorConfig cfg;
    cfg.k = k;
    cfg.lambda = lambda;
    cfg.rng_seed = seed;
    auto selection = run_selector(*method, features, w, cfg);
    return {std::move(selection.indices), selection.step_scores.value_or(std::vector<double>{})};
}

BoundMetrics metrics_impl(const FeatureMatrix& features, const ImportanceVector& w,
                          std::span<const std::size_t> indices, std::uint64_t seed, std::size_t trials) {
    check_paired(features, w);
    Selection selection;
    selection.indices.assign(indices.begin(), indices.end());
    HopkinsConfig cfg;
    cfg.rng_seed = seed;
    cfg.n_trials = trials;
    return {hopkins_statistic(features, selection, cfg), importance_retention(w, selection)};
}

}  // namespace

FeatureMatrix to_feature_matrix(ArrayView2d<double> view) { return widen(view); }
FeatureMatrix to_feature_matrix(ArrayView2d<float> view) { return widen(view); }

BoundSelection bound_select(ArrayView2d<double> features, std::span<const double> importance, std::string_view method,
                            std::size_t k, double lambda, std::uint64_t seed) {
    return select_impl(widen(features), widen(importance), method, k, lambda, seed);
}

BoundSelection bound_select(ArrayView2d<float> features, std::span<const float> importance, std::string_view method,
                            std::size_t k, double lambda, std::uint64_t seed) {
    return select_impl(widen(features), widen(importance), method, k, lambda, seed);
}

BoundMetrics bound_metrics(ArrayView2d<double> features, std::span<const double> importance,
                           std::span<const std::size_t> indices, std::uint64_t seed, std::size_t trials) {
    return metrics_impl(widen(features), widen(importance), indices, seed, trials);
}

BoundMetrics bound_metrics(ArrayView2d<float> features, std::span<const float> importance,
                           std::span<const std::size_t> indices, std::uint64_t seed, std::size_t trials) {
    return metrics_impl(widen(features), widen(importance), indices, seed, trials);
}

}  // namespace tokprune
