#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "foimc/errors.hpp"
#include "foimc/feasibility.hpp"
#include "foimc/solver.hpp"

using namespace foimc;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("order bound fixtures") {
    CHECK(beta_pos_min(1.1345) == doctest::Approx(0.638877434124).epsilon(1e-9));
    CHECK(std::abs(beta_pos_min(1.1345) - 0.6389) < 1e-3);
    CHECK(beta_pos_min(kPi / 2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(beta_pos_min(kPi - 1e-9) < 1e-9);

    CHECK(beta_pos_window_max(kPi / 2.0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(beta_pos_window_max(1.1345) == doctest::Approx(1.63887743412).epsilon(1e-9));
    CHECK(beta_pos_window_max(kPi - 1e-9) == doctest::Approx(1.0).epsilon(1e-9));

    CHECK(beta_pos_max_low(kPi / 3.0) == doctest::Approx(-2.0 / 3.0).epsilon(1e-12));
    CHECK(beta_pos_max_low(2.0 * kPi / 3.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(std::abs(beta_pos_max_low(1e-9)) < 1e-8);
    CHECK(beta_pos_max_low(2.0) == doctest::Approx(0.726760455265).epsilon(1e-9));

    CHECK(beta_pos_max_high(1.1345) == doctest::Approx(1.27775486825).epsilon(1e-9));
    CHECK(std::abs(beta_pos_max_high(1.1345) - 1.2778) < 1e-3);
    CHECK(beta_pos_max_high(kPi / 3.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(beta_pos_max_high(1e-9) == doctest::Approx(2.0).epsilon(1e-9));

    CHECK_THROWS_AS(beta_pos_max_low(kPi / 2.0), BranchError);
    CHECK_THROWS_AS(beta_pos_max_high(kPi / 2.0), BranchError);
    CHECK_THROWS_AS(beta_pos_min(0.0), SpecError);
    CHECK_THROWS_AS(beta_pos_min(kPi), SpecError);
}

TEST_CASE("realness gap bounds") {
    // both bounds collapse onto 1 where the gap closes
    CHECK(std::abs(beta_real_gap_lo(kPi / 3.0) - 1.0) < 1e-9);
    CHECK(std::abs(beta_real_gap_hi(kPi / 3.0) - 1.0) < 1e-9);

    CHECK(beta_real_gap_lo(0.5) == doctest::Approx(0.329523167392).epsilon(1e-9));
    CHECK(beta_real_gap_hi(0.5) == doctest::Approx(1.67047683261).epsilon(1e-9));
    CHECK(beta_real_gap_lo(1e-12) < 1e-11);

    CHECK_THROWS_AS(beta_real_gap_lo(1.1), DomainError);
    CHECK_THROWS_AS(beta_real_gap_hi(2.0), DomainError);
}

TEST_CASE("gap bound solves the boundary equation, cross-checked by bisection") {
    // boundary condition: sin(beta pi/2) = 2 sin(phi_m/2)
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> phi_d(0.01, kPi / 3.0 - 0.01);
    for (int i = 0; i < 200; ++i) {
        const double phi = phi_d(rng);
        const double target = 2.0 * std::sin(phi / 2.0);
        CHECK(std::abs(std::sin(beta_real_gap_lo(phi) * kPi / 2.0) - target) < 1e-10);
        CHECK(std::abs(std::sin(beta_real_gap_hi(phi) * kPi / 2.0) - target) < 1e-10);
    }
    // independent bisection on (0,1) for phi_m = 0.5
    double lo = 0.0, hi = 1.0;
    const double target = 2.0 * std::sin(0.25);
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std::sin(mid * kPi / 2.0) < target ? lo : hi) = mid;
    }
    CHECK(std::abs(beta_real_gap_lo(0.5) - 0.5 * (lo + hi)) < 1e-10);
}

TEST_CASE("feasible set case fixtures") {
    {
        const auto set = feasible_beta_set(1.1345);
        CHECK(set.case_label == FeasibilityCase::C);
        REQUIRE(set.intervals.size() == 1);
        CHECK(set.intervals[0].lo == doctest::Approx(0.638877434124).epsilon(1e-9));
        CHECK(set.intervals[0].hi == doctest::Approx(1.27775486825).epsilon(1e-9));
    }
    {
        const auto set = feasible_beta_set(0.5);
        CHECK(set.case_label == FeasibilityCase::A);
        REQUIRE(set.intervals.size() == 1);
        CHECK(set.intervals[0].lo == doctest::Approx(1.67047683261).epsilon(1e-9));
        CHECK(set.intervals[0].hi == doctest::Approx(1.68169011382).epsilon(1e-9));
    }
    {
        const auto set = feasible_beta_set(2.0);
        CHECK(set.case_label == FeasibilityCase::D);
        REQUIRE(set.intervals.size() == 1);
        CHECK(set.intervals[0].lo == doctest::Approx(0.363380227632).epsilon(1e-9));
        CHECK(set.intervals[0].hi == doctest::Approx(0.726760455265).epsilon(1e-9));
    }
    {
        const auto set = feasible_beta_set(0.93);
        CHECK(set.case_label == FeasibilityCase::B);
        REQUIRE(set.intervals.size() == 2);
        CHECK(set.intervals[0].lo == doctest::Approx(0.703971805849).epsilon(1e-9));
        CHECK(set.intervals[0].hi == doctest::Approx(0.708294273051).epsilon(1e-9));
        CHECK(set.intervals[1].lo == doctest::Approx(1.29170572695).epsilon(1e-9));
        CHECK(set.intervals[1].hi == doctest::Approx(1.4079436117).epsilon(1e-9));
    }
    {
        // removable singularity: upper bound pinned to its continuous limit
        const auto set = feasible_beta_set(kPi / 2.0);
        CHECK(set.case_label == FeasibilityCase::C);
        REQUIRE(set.intervals.size() == 1);
        CHECK(set.intervals[0].lo == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(set.intervals[0].hi == doctest::Approx(1.0).epsilon(1e-15));
    }
    CHECK_THROWS_AS(feasible_beta_set(-0.1), SpecError);
    CHECK_THROWS_AS(feasible_beta_set(kPi + 0.1), SpecError);
}

TEST_CASE("case split constant matches the re-derived boundary root") {
    // root of beta_pos_min(phi) = beta_real_gap_lo(phi) on (0.8, 1.0)
    double lo = 0.8, hi = 1.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (beta_pos_min(mid) > beta_real_gap_lo(mid) ? lo : hi) = mid;
    }
    CHECK(std::abs(0.5 * (lo + hi) - 0.9273) < 5e-5);
}

TEST_CASE("upper positivity bound is twice the lower bound") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double t = u(rng);
        if (t < 0.5) {
            const double phi = 1e-4 + 2.0 * t * (kPi - 2e-4);
            if (std::abs(phi - kPi / 2.0) < 1e-10) continue;
            if (phi < kPi / 2.0)
                CHECK(std::abs(beta_pos_max_high(phi) - 2.0 * beta_pos_min(phi)) < 1e-12);
            else
                CHECK(std::abs(beta_pos_max_low(phi) - 2.0 * beta_pos_min(phi)) < 1e-12);
        } else {
            // exercise the neighbourhood of the singular point as well
            const double phi = kPi / 2.0 + (t - 0.75) * 0.2;
            if (phi == kPi / 2.0) continue;
            const double bound =
                phi < kPi / 2.0 ? beta_pos_max_high(phi) : beta_pos_max_low(phi);
            CHECK(std::abs(bound - 2.0 * beta_pos_min(phi)) < 1e-12);
        }
    }
}

TEST_CASE("feasible intervals are contained in (beta_pos_min, 2)") {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> phi_d(0.01, kPi - 0.01);
    for (int i = 0; i < 200; ++i) {
        const double phi = phi_d(rng);
        const auto set = feasible_beta_set(phi);
        const double lo_bound = beta_pos_min(phi);
        for (const auto& iv : set.intervals) {
            CHECK(iv.lo >= lo_bound - 1e-12);
            CHECK(iv.hi <= 2.0);
            CHECK(iv.lo < iv.hi);
        }
    }
}

TEST_CASE("membership matches the sign and realness of the closed-form crossover") {
    std::mt19937 rng(2025);
    std::uniform_real_distribution<double> phi_d(0.02, kPi - 0.02), beta_d(0.001, 1.999);
    for (int i = 0; i < 200; ++i) {
        const double phi = phi_d(rng);
        const auto set = feasible_beta_set(phi);
        for (int j = 0; j < 200; ++j) {
            const double beta = beta_d(rng);
            bool positive_real = false;
            try {
                positive_real = gain_crossover_freq(beta, phi, 1.0) > 0.0;
            } catch (const RealnessError&) {
            }
            CHECK(set.contains(beta) == positive_real);
        }
    }
}

TEST_CASE("interval membership respects the guard band") {
    const auto set = feasible_beta_set(1.1345);
    const auto [lo, hi] = set.intervals[0];
    CHECK_FALSE(set.contains(lo));
    CHECK_FALSE(set.contains(lo + 5e-13));
    CHECK(set.contains(lo + 1e-11));
    CHECK(set.contains(hi - 1e-11));
    CHECK_FALSE(set.contains(hi));
    CHECK(set.span() == doctest::Approx(hi - lo));
}
