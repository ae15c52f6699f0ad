// Copyright (C) 2025 The tokprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tokprune/core.hpp"

namespace tokprune {

struct ManifoldSpec {
    std::size_t n_tokens = 256;
    std::size_t dim = 32;
    std::size_t n_clusters = 8;
    double cluster_spread = 0.15;
    double center_scale = 1.0;
    bool non_negative = false;
    std::uint64_t rng_seed = 42;
};

struct Manifold {
    FeatureMatrix features;
    ImportanceVector importance;
    std::vector<std::size_t> cluster_labels;
    std::size_t regenerated_rows = 0;
};

/**
 * Gaussian blobs around random unit-direction centers. The generator walk on
 * a single CounterRng(rng_seed) stream is:
 *   1. for each cluster: dim normals, normalized, times center_scale
 *   2. for each token: label = bounded(n_clusters), then dim normals scaled
 *      by cluster_spread and added to the center (a zero-norm row is redrawn
 *      from the same stream and counted in regenerated_rows)
 *   3. for each token: importance = uniform on (0, 1)
 * With non_negative the whole matrix is shifted by -min entry.
 */
Manifold generate_manifold(const ManifoldSpec& spec);

}  // namespace tokprune
