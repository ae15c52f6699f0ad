// Copyright (C) 2025 The tokprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "tokprune/core.hpp"
#include "tokprune/metrics.hpp"

namespace tokprune::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_data_error = 1;
inline constexpr int exit_usage_error = 2;

/// Entry point of the `tokprune` executable. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "start:stop:step", inclusive of stop when it lies on the grid. Values are
/// rounded to 12 decimals so 0.1 steps land on 0.3 rather than
/// 0.30000000000000004. Throws DomainError on a malformed grid.
std::vector<double> parse_lambda_grid(std::string_view text);

struct SweepOptions {
    std::size_t k = 1;
    std::vector<Method> methods;
    std::vector<double> lambda_grid;
    HopkinsConfig hopkins;
};

/// One TradeoffPoint per (method, lambda) cell, lambda-free methods once.
/// Rows follow the order of `methods`, then ascending grid position.
std::vector<TradeoffPoint> run_sweep(const FeatureMatrix& features, const ImportanceVector& w,
                                     const SweepOptions& options);

struct BenchOptions {
    std::size_t n_tokens = 4096;
    std::size_t dim = 64;
    std::size_t k = 1024;
    std::size_t reps = 3;
    std::uint64_t seed = 0;
    double lambda = 0.5;
};

struct BenchReport {
    bool outputs_equal = false;
    double fast_median_ms = 0.0;
    double naive_median_ms = 0.0;
    double speedup() const noexcept { return naive_median_ms / fast_median_ms; }
};

/// Times select_mmr against select_mmr_naive on a generated manifold after
/// checking that both return identical indices and step scores. Timing is
/// skipped when they differ.
BenchReport run_bench(const BenchOptions& options);

}  // namespace tokprune::cli
