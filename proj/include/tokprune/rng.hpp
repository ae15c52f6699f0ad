// Copyright (C) 2025 The tokprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace tokprune {

/**
 * Counter-based 64-bit generator. Output number `i` (1-based) of a stream
 * with key `k` is `splitmix64_mix(k + i * 0x9E3779B97F4A7C15)`, which for a
 * key equal to the seed is exactly the SplitMix64 sequence. Because the
 * output depends only on (key, counter) the stream is reproducible on every
 * platform and independent sub-streams can be derived without shared state.
 *
 * Test vectors (seed 1234567): 6457827717110365317, 3203168211198807973,
 * 9817491932198370423, 4593380528125082431, 16408922859458223821.
 */
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) noexcept : m_key(seed) {}

    /// Stream for sub-task `stream` of a run seeded with `seed`.
    static CounterRng derive(std::uint64_t seed, std::uint64_t stream) noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;

    /// Uniform on the open interval (0, 1).
    double uniform_open() noexcept;

    /// Uniform integer on [0, bound). `bound` must be positive.
    std::uint64_t bounded(std::uint64_t bound) noexcept;

    /// Standard normal via Box-Muller (no cached second value).
    double normal() noexcept;

    std::uint64_t counter() const noexcept { return m_counter; }

private:
    std::uint64_t m_key;
    std::uint64_t m_counter = 0;
};

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

}  // namespace tokprune
