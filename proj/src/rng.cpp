// Copyright (C) 2025 The tokprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "tokprune/rng.hpp"

#include <cmath>
#include <numbers>

namespace tokprune {

namespace {
constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;
constexpr double two_pow_minus_53 = 1.0 / 9007199254740992.0;
__extension__ using uint128 = unsigned __int128;
}  // namespace

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

CounterRng CounterRng::derive(std::uint64_t seed, std::uint64_t stream) noexcept {
    return CounterRng(splitmix64_mix(seed ^ splitmix64_mix(stream + golden_gamma)));
}

std::uint64_t CounterRng::next_u64() noexcept {
    ++m_counter;
    return splitmix64_mix(m_key + m_counter * golden_gamma);
}

double CounterRng::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * two_pow_minus_53;
}

double CounterRng::uniform_open() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * two_pow_minus_53;
}

std::uint64_t CounterRng::bounded(std::uint64_t bound) noexcept {
    // Lemire's multiply-shift with rejection; unbiased for every bound.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const uint128 product = static_cast<uint128>(next_u64()) * bound;
        if (static_cast<std::uint64_t>(product) >= threshold) {
            return static_cast<std::uint64_t>(product >> 64);
        }
    }
}

double CounterRng::normal() noexcept {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace tokprune
