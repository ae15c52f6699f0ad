// Copyright (C) 2025 The tokprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "tokprune/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tokprune/errors.hpp"
#include "tokprune/rng.hpp"

namespace tokprune {

namespace {

constexpr int max_regeneration_passes = 1000;

void validate_spec(const ManifoldSpec& spec) {
    if (spec.n_tokens < 1 || spec.dim < 1) {
        throw DomainError("manifold needs at least one token and one dimension");
    }
    if (spec.n_clusters < 1 || spec.n_clusters > spec.n_tokens) {
        throw DomainError("n_clusters must be in [1, n_tokens]");
    }
    if (!(spec.cluster_spread > 0.0) || !std::isfinite(spec.cluster_spread)) {
        throw DomainError("cluster_spread must be positive");
    }
    if (!(spec.center_scale > 0.0) || !std::isfinite(spec.center_scale)) {
        throw DomainError("center_scale must be positive");
    }
    if (spec.non_negative && spec.dim < 2) {
        // The row holding the minimum entry would always shift to zero.
        throw DomainError("non_negative manifolds need dim >= 2");
    }
}

bool is_zero(std::span<const double> row) {
    return std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; });
}

}  // namespace

Manifold generate_manifold(const ManifoldSpec& spec) {
    validate_spec(spec);
    const std::size_t n = spec.n_tokens;
    const std::size_t d = spec.dim;
    CounterRng rng(spec.rng_seed);

    std::vector<double> centers(spec.n_clusters * d);
    for (std::size_t c = 0; c < spec.n_clusters; ++c) {
        const std::span<double> center(centers.data() + c * d, d);
        double sq = 0.0;
        while (sq == 0.0) {
            sq = 0.0;
            for (double& v : center) {
                v = rng.normal();
                sq += v * v;
            }
        }
        const double scale = spec.center_scale / std::sqrt(sq);
        for (double& v : center) {
            v *= scale;
        }
    }

    std::vector<double> data(n * d);
    std::vector<std::size_t> labels(n);
    std::size_t regenerated = 0;
    auto draw_row = [&](std::size_t i) {
        const std::span<double> row(data.data() + i * d, d);
        const double* center = centers.data() + labels[i] * d;
        for (std::size_t c = 0; c < d; ++c) {
            row[c] = center[c] + spec.cluster_spread * rng.normal();
        }
    };
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = static_cast<std::size_t>(rng.bounded(spec.n_clusters));
        draw_row(i);
        while (is_zero({data.data() + i * d, d})) {
            ++regenerated;
            draw_row(i);
        }
    }

    std::vector<double> importance(n);
    for (double& v : importance) {
        v = rng.uniform_open();
    }

    if (spec.non_negative) {
        for (int pass = 0;; ++pass) {
            if (pass == max_regeneration_passes) {
                throw DomainError("could not generate a non-negative manifold without zero rows");
            }
            const double shift = *std::min_element(data.begin(), data.end());
            bool clean = true;
            for (std::size_t i = 0; i < n; ++i) {
                const std::span<const double> row(data.data() + i * d, d);
                if (std::all_of(row.begin(), row.end(), [&](double v) { return v - shift == 0.0; })) {
                    ++regenerated;
                    draw_row(i);
                    clean = false;
                }
            }
            if (clean) {
                for (double& v : data) {
                    v -= shift;
                }
                break;
            }
        }
    }

    return Manifold{FeatureMatrix(n, d, std::move(data)), ImportanceVector(std::move(importance)), std::move(labels),
                    regenerated};
}

}  // namespace tokprune
