#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

#include "doctest.h"

#include "ilpp/error.hpp"
#include "ilpp/lattice.hpp"
#include "oracles.hpp"

using namespace ilpp;

namespace {

AlphaField constant(const RectangleDomain& q, double c = 1.0) {
    const std::vector<double> p{c};
    return make_preset("constant", p, q);
}

std::vector<Site> alternating(int n_steps) {
    std::vector<Site> s{{0, 0}};
    for (int i = 1; i <= n_steps; ++i) {
        s.push_back({i, i % 2});
    }
    return s;
}

}  // namespace

TEST_CASE("lattice admissibility") {
    CHECK(LatticeSpec::admissible(RectangleDomain(1.0, 0.0), 2));
    CHECK_FALSE(LatticeSpec::admissible(RectangleDomain(1.0, 0.0), 3));  // N(l + b) odd
    CHECK_FALSE(LatticeSpec::admissible(RectangleDomain(1.0, 0.5), 2));
    CHECK_FALSE(LatticeSpec::admissible(RectangleDomain(1.0, 0.5), 3));  // N b not integral
    CHECK(LatticeSpec::admissible(RectangleDomain(1.0, 0.5), 4));
    CHECK_THROWS_AS(LatticeSpec(RectangleDomain(1.0, 0.5), 2), ValidationError);
    CHECK_THROWS_AS(LatticeSpec(RectangleDomain(1.0, 0.0), 0), ValidationError);
    CHECK(LatticeSpec::auto_adjusted(RectangleDomain(1.0, 0.5), 2).n() == 4);
    CHECK(LatticeSpec::auto_adjusted(RectangleDomain(1.0, 0.0), 99).n() == 100);
    CHECK(LatticeSpec::auto_adjusted(RectangleDomain(1.0, 0.0), 100).n() == 100);
}

TEST_CASE("slices match a direct enumeration of S_N") {
    for (auto [l, b, n] : {std::tuple{1.0, 0.0, 6}, {1.0, 0.5, 8}, {2.0, -0.5, 4}, {1.5, 0.25, 8}}) {
        const RectangleDomain q(l, b);
        const LatticeSpec spec(q, n);
        std::size_t count = 0;
        for (int i = 0; i <= spec.end_i(); ++i) {
            for (int j = -i; j <= i; ++j) {
                const bool in = (i + j) % 2 == 0 && q.contains(static_cast<double>(i) / n, static_cast<double>(j) / n, 1e-12);
                REQUIRE(spec.contains_site(i, j) == in);
                if (in) {
                    REQUIRE(spec.index(i, j) == count);
                    ++count;
                }
            }
        }
        CHECK(spec.site_count() == count);
    }
}

TEST_CASE("reward sampling") {
    const RectangleDomain q(1.0, 0.0);
    const LatticeSpec spec(q, 100);

    SUBCASE("deterministic in the seed") {
        const auto a = sample_rewards(spec, constant(q), 42);
        const auto b = sample_rewards(spec, constant(q), 42);
        const auto c = sample_rewards(spec, constant(q), 43);
        REQUIRE(a.rewards().size() == b.rewards().size());
        CHECK(std::equal(a.rewards().begin(), a.rewards().end(), b.rewards().begin()));
        CHECK_FALSE(std::equal(a.rewards().begin(), a.rewards().end(), c.rewards().begin()));
    }

    SUBCASE("empirical mean 1/N") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto r = sample_rewards(spec, constant(q), seed);
            double sum = 0.0;
            for (double v : r.rewards()) {
                sum += v;
            }
            const double mean = sum / static_cast<double>(r.rewards().size());
            REQUIRE(mean >= 0.009);
            REQUIRE(mean <= 0.011);
        }
    }

    SUBCASE("zero alpha gives zero rewards") {
        AlphaField::Analytic half;
        half.name = "half";
        half.value = [](double x, double) { return x < 0.5 ? 0.0 : 1.0; };
        const auto f = AlphaField::analytic(q, half);
        const auto r = sample_rewards(spec, f, 3);
        for (int i = 0; i <= spec.end_i(); ++i) {
            for (int j = spec.slice_lo(i); j <= spec.slice_hi(i); j += 2) {
                if (i < 50) {
                    REQUIRE(r.at(i, j) == 0.0);
                } else {
                    REQUIRE(r.at(i, j) > 0.0);
                }
            }
        }
    }
}

TEST_CASE("reward dump round trip") {
    const RectangleDomain q(1.0, 0.5);
    const LatticeSpec spec(q, 8);
    const auto r = sample_rewards(spec, constant(q, 2.0), 9);
    const auto path = std::filesystem::temp_directory_path() / "ilpp_rewards.bin";
    r.write_binary(path);
    const auto back = RewardField::read_binary(path);
    std::filesystem::remove(path);
    CHECK(back.spec() == spec);
    CHECK(back.seed() == 9);
    CHECK(std::equal(r.rewards().begin(), r.rewards().end(), back.rewards().begin(), back.rewards().end()));
}

TEST_CASE("two-step example") {
    const LatticeSpec spec(RectangleDomain(1.0, 0.0), 2);
    // slice order: (0,0); (1,-1), (1,1); (2,0)
    const RewardField r(spec, 0, {0.1, 0.2, 0.3, 0.4});
    const auto sol = lpp_solve(r);
    CHECK(sol.passage_time == doctest::Approx(0.8));
    CHECK(sol.path.sites()[1] == Site{1, 1});
}

TEST_CASE("zero rewards: upper tie-break") {
    const RectangleDomain q(1.0, 0.25);
    const LatticeSpec spec(q, 8);
    const RewardField r(spec, 0, std::vector<double>(spec.site_count(), 0.0));
    const auto sol = lpp_solve(r);
    CHECK(sol.passage_time == 0.0);
    for (const auto& s : sol.path.sites()) {
        REQUIRE(s.j == std::min(s.i, spec.end_j() + (spec.end_i() - s.i)));
    }
}

TEST_CASE("lpp_solve equals exhaustive enumeration bit for bit") {
    for (auto [l, b, n] : {std::tuple{1.0, 0.0, 4}, {1.0, 0.5, 8}, {2.0, 0.0, 6}, {1.0, -0.5, 12}, {3.0, 1.0, 4}}) {
        const RectangleDomain q(l, b);
        const LatticeSpec spec(q, n);
        const auto f = make_preset("exp_y", std::vector<double>{1.0, 0.5}, q);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto r = sample_rewards(spec, f, seed);
            const auto sol = lpp_solve(r);
            const auto brute = oracle::enumerate_lpp(r);
            REQUIRE(sol.passage_time == brute.best);
            REQUIRE(sol.path.reward_sum(r) == sol.passage_time);
            const std::vector<Site> got(sol.path.sites().begin(), sol.path.sites().end());
            REQUIRE(std::find(brute.argmax.begin(), brute.argmax.end(), got) != brute.argmax.end());
        }
    }
}

TEST_CASE("monotone in each reward and in alpha") {
    const RectangleDomain q(1.0, 0.0);
    const LatticeSpec spec(q, 20);
    std::mt19937_64 rng(5);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto r = sample_rewards(spec, constant(q), seed);
        const double g = lpp_solve(r).passage_time;
        std::vector<double> bumped(r.rewards().begin(), r.rewards().end());
        const std::size_t k = rng() % bumped.size();
        bumped[k] += 0.05;
        REQUIRE(lpp_solve(RewardField(spec, seed, bumped)).passage_time >= g);
    }
    const auto low = make_preset("parabolic", std::vector<double>{1.5, -1.0}, q);
    const auto high = make_preset("parabolic", std::vector<double>{2.0, 0.0}, q);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        REQUIRE(lpp_solve(sample_rewards(spec, high, seed)).passage_time >=
                lpp_solve(sample_rewards(spec, low, seed)).passage_time);
    }
}

TEST_CASE("homogeneous limit within 3% at N = 500") {
    for (double b : {0.0, 0.5}) {
        const RectangleDomain q(1.0, b);
        const LatticeSpec spec(q, 500);
        double sum = 0.0;
        const int seeds = 100;
        for (int s = 0; s < seeds; ++s) {
            sum += lpp_solve(sample_rewards(spec, constant(q), static_cast<std::uint64_t>(s))).passage_time;
        }
        CAPTURE(b);
        CHECK(std::abs(sum / seeds - oracle::gamma(b)) <= 0.03 * oracle::gamma(b));
    }
}

TEST_CASE("directed path validation") {
    const LatticeSpec spec(RectangleDomain(1.0, 0.0), 4);
    CHECK_NOTHROW(DirectedPath(spec, {{0, 0}, {1, 1}, {2, 0}, {3, 1}, {4, 0}}));
    CHECK_THROWS_AS(DirectedPath(spec, {{0, 0}, {1, 1}, {2, 2}, {3, 1}}), ValidationError);           // short
    CHECK_THROWS_AS(DirectedPath(spec, {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 0}}), ValidationError);   // jump
    CHECK_THROWS_AS(DirectedPath(spec, {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 2}}), ValidationError);   // leaves Q
}

TEST_CASE("path sup distance") {
    const RectangleDomain q(1.0, 0.0);
    const LatticeSpec spec(q, 10);
    const DirectedPath zigzag(spec, alternating(10));
    const auto flat = LipschitzPath::uniform(q, std::vector<double>(11, 0.0));
    CHECK(path_sup_distance(zigzag, flat) == doctest::Approx(0.1));
    CHECK(path_sup_distance(zigzag, zigzag.as_curve(q)) == 0.0);

    // Reflection symmetry.
    const auto r = sample_rewards(spec, constant(q), 1);
    const auto sol = lpp_solve(r);
    const auto y = LipschitzPath::sample(q, 20, [](double x) { return 0.3 * std::sin(M_PI * x) * 0.5; });
    CHECK(path_sup_distance(sol.path, y) ==
          doctest::Approx(path_sup_distance(sol.path.reflected(spec), y.reflected())));

    const RectangleDomain other(1.0, 0.2);
    const auto line = LipschitzPath::uniform(other, {0.0, 0.2});
    CHECK_THROWS_AS(path_sup_distance(zigzag, line), ValidationError);
}
