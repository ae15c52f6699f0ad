// Copyright (C) 2025 The tokprune Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "tokprune/errors.hpp"
#include "tokprune/metrics.hpp"
#include "tokprune/selectors.hpp"
#include "tokprune/synth.hpp"

using namespace tokprune;

namespace {

Selection of(std::vector<std::size_t> indices) {
    Selection s;
    s.indices = std::move(indices);
    return s;
}

TradeoffPoint pt(double h, double i) { return TradeoffPoint{Method::mmr, std::nullopt, h, i}; }

// Two copies of (1,0) selected; the pool still holds (0,1) tokens.
FeatureMatrix duplicate_fixture() { return FeatureMatrix(4, 2, {1, 0, 1, 0, 0, 1, 0, 1}); }

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("importance retention") {
    const ImportanceVector w({1, 2, 3, 4});
    CHECK(importance_retention(w, of({2, 3})) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(importance_retention(w, of({3, 1, 0, 2})) == 1.0);
    CHECK_THROWS_AS(importance_retention(ImportanceVector({0, 0}), of({0})), UndefinedRatioError);
    CHECK_THROWS_AS(importance_retention(ImportanceVector({1, -1}), of({0})), DomainError);
    CHECK_THROWS_AS(importance_retention(w, of({4})), ValidationError);
}

TEST_CASE("importance retention matches direct summation and is monotone") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto w = oracle::random_scores(100, seed);
        CounterRng rng(seed + 77);
        std::vector<std::size_t> idx(100);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        for (std::size_t i = 0; i < 25; ++i) {
            std::swap(idx[i], idx[i + rng.bounded(100 - i)]);
        }
        idx.resize(26);
        long double kept = 0, total = 0;
        for (std::size_t i = 0; i < 25; ++i) kept += w[idx[i]];
        for (double v : w) total += v;
        const ImportanceVector iw(w);
        const double r25 = importance_retention(iw, of({idx.begin(), idx.begin() + 25}));
        CHECK(std::abs(r25 - static_cast<double>(kept / total)) <= 1e-12);
        CHECK(importance_retention(iw, of(idx)) >= r25);
    }
}

TEST_CASE("hopkins on the duplicate-token fixture is exactly one") {
    HopkinsConfig cfg;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        cfg.rng_seed = seed;
        CHECK(hopkins_statistic(duplicate_fixture(), of({0, 1}), cfg) == 1.0);
    }
}

TEST_CASE("hopkins errors") {
    HopkinsConfig cfg;
    CHECK_THROWS_AS(hopkins_statistic(duplicate_fixture(), of({0}), cfg), DomainError);
    const FeatureMatrix same(3, 2, {1, 1, 1, 1, 1, 1});
    CHECK_THROWS_AS(hopkins_statistic(same, of({0, 1}), cfg), DegenerateGeometryError);
    cfg.n_trials = 0;
    CHECK_THROWS_AS(hopkins_statistic(duplicate_fixture(), of({0, 1}), cfg), DomainError);
}

TEST_CASE("hopkins stays in [0, 1] on fuzzed inputs") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        CounterRng rng(seed);
        const std::size_t n = 3 + rng.bounded(40);
        const std::size_t d = 1 + rng.bounded(6);
        const FeatureMatrix f(n, d, oracle::random_matrix(n, d, seed + 5, seed % 3 == 0 ? 2.0 : 0.0));
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        const std::size_t m = 2 + rng.bounded(n - 1);
        for (std::size_t i = 0; i < m; ++i) std::swap(idx[i], idx[i + rng.bounded(n - i)]);
        idx.resize(m);
        HopkinsConfig cfg;
        cfg.rng_seed = seed;
        cfg.n_trials = 1 + rng.bounded(8);
        cfg.reference_mode = seed % 2 ? ReferenceMode::uniform_in_bbox : ReferenceMode::resample_from_pool;
        try {
            const double h = hopkins_statistic(f, of(idx), cfg);
            CHECK(h >= 0.0);
            CHECK(h <= 1.0);
        } catch (const DegenerateGeometryError&) {
            // d = 1 can make every distance vanish; that is a valid outcome.
            CHECK(d == 1);
        }
    }
}

TEST_CASE("hopkins matches a straight-line reimplementation") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const FeatureMatrix f(30, 4, oracle::random_matrix(30, 4, 40 + seed));
        const std::vector<std::size_t> s{0, 3, 7, 11, 19, 25, 29};
        HopkinsConfig cfg;
        cfg.rng_seed = seed;
        cfg.n_trials = 5;
        CHECK(hopkins_statistic(f, of(s), cfg) ==
              doctest::Approx(oracle::hopkins_pool(f, s, seed, 5)).epsilon(1e-12));
    }
}

TEST_CASE("hopkins is invariant to positive per-row rescaling") {
    const FeatureMatrix f(40, 5, oracle::random_matrix(40, 5, 8));
    std::vector<double> scaled(f.data().begin(), f.data().end());
    CounterRng rng(3);
    for (std::size_t i = 0; i < 40; ++i) {
        const double c = 0.01 + 100.0 * rng.uniform();
        for (std::size_t d = 0; d < 5; ++d) scaled[i * 5 + d] *= c;
    }
    const FeatureMatrix g(40, 5, scaled);
    const auto s = of({1, 4, 9, 16, 25, 36});
    HopkinsConfig cfg;
    CHECK(std::abs(hopkins_statistic(f, s, cfg) - hopkins_statistic(g, s, cfg)) <= 1e-9);
}

TEST_CASE("hopkins on the clustered seed-42 fixture") {
    const auto m = generate_manifold(ManifoldSpec{});
    SelectorConfig sc;
    sc.k = 64;
    const auto greedy = select_greedy_importance(m.features, m.importance, sc);
    const auto fps = select_fps(m.features, m.importance, sc);
    HopkinsConfig cfg;
    cfg.n_trials = 16;
    const double h_greedy = hopkins_statistic(m.features, greedy, cfg);
    const double h_fps = hopkins_statistic(m.features, fps, cfg);
    CHECK(h_greedy > h_fps);
    // Frozen from oracle::hopkins_pool at first computation.
    CHECK(h_greedy == doctest::Approx(0.50026785281962949).epsilon(1e-12));
    CHECK(h_fps == doctest::Approx(0.4211063769304958).epsilon(1e-12));
}

TEST_CASE("angle histogram") {
    SUBCASE("orthogonal pair lands in the bin starting at 90") {
        const auto h = angle_histogram(FeatureMatrix(2, 2, {1, 0, 0, 1}));
        CHECK(h.n_pairs == 1);
        CHECK(h.counts[30] == 1);
        CHECK(h.bin_edges_deg[30] == 90.0);
        CHECK(h.mass_above_90 == 0.0);
    }
    SUBCASE("45 degrees") {
        const auto h = angle_histogram(FeatureMatrix(2, 2, {1, 1, 1, 0}));
        CHECK(h.counts[15] == 1);
    }
    SUBCASE("antiparallel pair lands in the last bin") {
        const auto h = angle_histogram(FeatureMatrix(2, 2, {1, 0, -1, 0}));
        CHECK(h.counts[59] == 1);
        CHECK(h.mass_above_90 == 1.0);
    }
    SUBCASE("matches a brute-force pairwise count") {
        const FeatureMatrix f(25, 3, oracle::random_matrix(25, 3, 17));
        const auto h = angle_histogram(f, 12);
        std::vector<std::uint64_t> expected(12, 0);
        std::uint64_t obtuse = 0;
        for (std::size_t i = 0; i < 25; ++i) {
            for (std::size_t j = i + 1; j < 25; ++j) {
                const double c = cosine_similarity(f.row(i), f.row(j));
                const double deg = std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / M_PI;
                ++expected[std::min<std::size_t>(11, static_cast<std::size_t>(deg / 15.0))];
                obtuse += c < 0 ? 1 : 0;
            }
        }
        CHECK(h.counts == expected);
        CHECK(h.mass_above_90 == doctest::Approx(static_cast<double>(obtuse) / 300.0));
    }
    SUBCASE("subsampling is seeded") {
        const FeatureMatrix f(40, 3, oracle::random_matrix(40, 3, 2));
        const auto a = angle_histogram(f, 60, 100, 5);
        CHECK(a.n_pairs == 100);
        CHECK(a.counts == angle_histogram(f, 60, 100, 5).counts);
    }
    CHECK_THROWS_AS(angle_histogram(FeatureMatrix(1, 2, {1, 0})), DomainError);
}

TEST_CASE("non-negative features have no obtuse pairs") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto data = oracle::random_matrix(30, 4, seed);
        for (double& v : data) v = std::abs(v);
        CHECK(angle_histogram(FeatureMatrix(30, 4, data)).mass_above_90 == 0.0);
    }
}

TEST_CASE("pareto frontier") {
    SUBCASE("incomparable points both survive") {
        const auto f = pareto_frontier({pt(0.2, 0.5), pt(0.8, 0.9)});
        REQUIRE(f.size() == 2);
        CHECK(f[0].hopkins == 0.2);
        CHECK(f[1].hopkins == 0.8);
    }
    SUBCASE("strict domination") {
        const auto f = pareto_frontier({pt(0.3, 0.8), pt(0.2, 0.9)});
        REQUIRE(f.size() == 1);
        CHECK(f[0] == pt(0.2, 0.9));
    }
    SUBCASE("duplicates collapse") {
        CHECK(pareto_frontier({pt(0.2, 0.9), pt(0.2, 0.9)}).size() == 1);
    }
    SUBCASE("matches the quadratic dominance scan") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            CounterRng rng(seed);
            std::vector<TradeoffPoint> pts;
            for (int i = 0; i < 200; ++i) {
                // coarse grid so ties and duplicates occur
                pts.push_back(pt(static_cast<double>(rng.bounded(50)) / 50.0, static_cast<double>(rng.bounded(50)) / 50.0));
            }
            std::set<std::pair<double, double>> expected;
            for (const auto& q : pts) {
                if (!oracle::dominated_by_any(q, pts)) expected.emplace(q.hopkins, q.retention);
            }
            const auto f = pareto_frontier(pts);
            std::set<std::pair<double, double>> got;
            for (const auto& p : f) got.emplace(p.hopkins, p.retention);
            CHECK(got == expected);
            CHECK(got.size() == f.size());
            CHECK(std::is_sorted(f.begin(), f.end(),
                                 [](const auto& a, const auto& b) { return a.hopkins < b.hopkins; }));
            for (const auto& q : pts) {
                CHECK(std::any_of(f.begin(), f.end(), [&](const auto& p) {
                    return dominates(p, q) || (p.hopkins == q.hopkins && p.retention == q.retention);
                }));
            }
        }
    }
}

TEST_CASE("dominance report") {
    const auto r = dominance_report({pt(0.1, 0.9)}, {pt(0.5, 0.5), pt(0.6, 0.4)});
    CHECK(r.n_dominated == 2);
    CHECK(r.fraction() == 1.0);
    const std::vector<TradeoffPoint> a{pt(0.2, 0.5), pt(0.8, 0.9)};
    const auto self = dominance_report(a, a);
    CHECK(self.n_dominated == 0);
    CHECK(self.summary() == "0/2 points dominated");
}

}
