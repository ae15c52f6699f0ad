// Copyright (C) 2025 The tokprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// In-memory entry points for foreign-language bindings. Inputs are borrowed
// contiguous row-major buffers; float32 buffers are widened to double before
// any arithmetic, so results match the file-based CLI bit for bit.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tokprune/core.hpp"

namespace tokprune {

template <typename T>
struct ArrayView2d {
    std::span<const T> data;
    std::size_t n_tokens = 0;
    std::size_t dim = 0;
};

struct BoundSelection {
    std::vector<std::size_t> indices;
    std::vector<double> step_scores;
};

struct BoundMetrics {
    double hopkins = 0.0;
    double retention = 0.0;
};

/// `method` takes the CLI spellings. Throws DomainError for an unknown
/// method, PairingError for mismatched lengths, plus every selector error.
BoundSelection bound_select(ArrayView2d<double> features, std::span<const double> importance, std::string_view method,
                            std::size_t k, double lambda = 0.5, std::uint64_t seed = 0);
BoundSelection bound_select(ArrayView2d<float> features, std::span<const float> importance, std::string_view method,
                            std::size_t k, double lambda = 0.5, std::uint64_t seed = 0);

/// Hopkins uses resample_from_pool with the given seed and trial count.
BoundMetrics bound_metrics(ArrayView2d<double> features, std::span<const double> importance,
                           std::span<const std::size_t> indices, std::uint64_t seed = 0, std::size_t trials = 16);
BoundMetrics bound_metrics(ArrayView2d<float> features, std::span<const float> importance,
                           std::span<const std::size_t> indices, std::uint64_t seed = 0, std::size_t trials = 16);

FeatureMatrix to_feature_matrix(ArrayView2d<double> view);
FeatureMatrix to_feature_matrix(ArrayView2d<float> view);

}  // namespace tokprune
