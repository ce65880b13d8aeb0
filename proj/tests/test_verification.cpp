#include <cmath>
#include <tuple>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "foimc/errors.hpp"
#include "foimc/model.hpp"
#include "foimc/solver.hpp"
#include "foimc/verification.hpp"

using namespace foimc;

namespace {
constexpr double kPi = std::numbers::pi;

// Margin routine for the integer-order loop only, written against the real
// trigonometric forms rather than the complex evaluator. Test-only oracle.
struct IntOrderMargins {
    double omega_g, omega_p, gain_margin, phase_margin;
};

IntOrderMargins int_order_margins(double lambda, double theta) {
    auto norm2 = [&](double w) {
        const double re = 1.0 - std::cos(theta * w);
        const double im = lambda * w + std::sin(theta * w);
        return re * re + im * im;
    };
    auto phase = [&](double w) {
        // real part never goes negative, so atan2 stays on one branch
        return -theta * w -
               std::atan2(lambda * w + std::sin(theta * w), 1.0 - std::cos(theta * w));
    };
    auto root = [](double lo, double hi, auto f) {
        double flo = f(lo);
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            ((f(mid) > 0.0) == (flo > 0.0) ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    // scan a linear grid for the first sign changes
    double wg = 0.0, wp = 0.0;
    double prev_n = norm2(1e-4) - 1.0, prev_p = phase(1e-4) + kPi;
    for (int i = 1; i <= 400000; ++i) {
        const double w = 1e-4 + i * (20.0 / 400000.0);
        const double cur_n = norm2(w) - 1.0;
        const double cur_p = phase(w) + kPi;
        if (wg == 0.0 && prev_n < 0.0 && cur_n >= 0.0)
            wg = root(w - 20.0 / 400000.0, w, [&](double x) { return norm2(x) - 1.0; });
        if (wp == 0.0 && prev_p > 0.0 && cur_p <= 0.0)
            wp = root(w - 20.0 / 400000.0, w, [&](double x) { return phase(x) + kPi; });
        prev_n = cur_n;
        prev_p = cur_p;
        if (wg != 0.0 && wp != 0.0) break;
    }
    return {wg, wp, std::sqrt(norm2(wp)), kPi + phase(wg)};
}
}  // namespace

TEST_CASE("measured margins of the reported example parameters") {
    {
        const MarginReport rep =
            measure_margins({40.46, 1.043}, 40.0, default_margin_sweep(40.0));
        CHECK(std::abs(rep.gain_margin / 3.0 - 1.0) < 0.02);
        CHECK(std::abs(rep.phase_margin - 1.1345) < 0.01);
        CHECK(rep.gain_margin == doctest::Approx(3.000930617).epsilon(1e-5));
        CHECK(rep.phase_margin == doctest::Approx(1.134650861).epsilon(1e-6));
        CHECK(rep.omega_g == doctest::Approx(0.01387506027).epsilon(1e-6));
        CHECK(rep.omega_p == doctest::Approx(0.05063167937).epsilon(1e-6));
        CHECK(rep.residual_gain_cross < 1e-7);
        CHECK(rep.residual_phase_cross < 1e-7);
    }
    {
        const MarginReport rep = measure_margins({4.623, 1.043}, 5.0, default_margin_sweep(5.0));
        CHECK(std::abs(rep.gain_margin / 3.0 - 1.0) < 0.02);
        CHECK(std::abs(rep.phase_margin - 1.1345) < 0.01);
        CHECK(rep.omega_g == doctest::Approx(0.1110218858).epsilon(1e-6));
        CHECK(rep.omega_p == doctest::Approx(0.4050835222).epsilon(1e-6));
    }
}

TEST_CASE("sweep margins agree with an independent integer-order routine") {
    const MarginReport rep = measure_margins({1.0, 1.0}, 1.0, default_margin_sweep(1.0));
    const IntOrderMargins ind = int_order_margins(1.0, 1.0);
    CHECK(std::abs(rep.omega_g - ind.omega_g) < 1e-6);
    CHECK(std::abs(rep.omega_p - ind.omega_p) < 1e-6);
    CHECK(std::abs(rep.gain_margin - ind.gain_margin) < 1e-6);
    CHECK(std::abs(rep.phase_margin - ind.phase_margin) < 1e-6);
}

TEST_CASE("sweep preconditions and crossover failures") {
    CHECK_THROWS_AS(measure_margins({1.0, 1.0}, 1.0, FrequencySweep{1e-4, 1e2, 1500}),
                    DomainError);
    CHECK_THROWS_AS(measure_margins({1.0, 1.0}, 1.0, FrequencySweep{1e-3, 1e2, 4000}),
                    DomainError);
    CHECK_THROWS_AS(measure_margins({1.0, 1.0}, 1.0, FrequencySweep{1e-4, 10.0, 4000}),
                    DomainError);
    // loop gain below unity everywhere: no crossing from above
    CHECK_THROWS_AS(measure_margins({1e9, 1.0}, 1.0, default_margin_sweep(1.0)),
                    NoCrossoverError);
    CHECK_THROWS_AS(sweep_open_loop({1.0, 1.0}, 1.0, FrequencySweep{1.0, 0.5, 100}),
                    DomainError);
}

TEST_CASE("parallel sweep is identical to the serial reference") {
    const FrequencySweep sweep = default_margin_sweep(5.0);
    const auto a = sweep_open_loop({4.623, 1.043}, 5.0, sweep, Exec::Serial);
    const auto b = sweep_open_loop({4.623, 1.043}, 5.0, sweep, Exec::Parallel);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].omega == b[i].omega);
        CHECK(a[i].value == b[i].value);
    }
}

TEST_CASE("brute-force oracle lands on the lag-dominant solution") {
    const ProcessModel model{0.43, 148.0, 40.0};
    const RobustnessSpec spec{3.0, 1.1345};
    const FoFilterParams bf = brute_force_tune(model, spec);
    const auto set = feasible_beta_set(spec.phase_margin);
    const double beta_cell = set.span() / 200.0;
    const double llam_cell = std::log(1e6) / 200.0;
    CHECK(std::abs(bf.beta - 1.043) < beta_cell);
    CHECK(std::abs(std::log(bf.lambda / 40.46)) < llam_cell);

    const TuningResult r = tune(model, spec);
    CHECK(std::abs(bf.beta - r.params.beta) < beta_cell);
    CHECK(std::abs(std::log(bf.lambda / r.params.lambda)) < llam_cell);
}

TEST_CASE("brute-force oracle agrees with tune on a two-interval feasible set") {
    const ProcessModel model{1.0, 1.0, 1.0};
    const RobustnessSpec spec{3.0, 0.93};
    const TuningResult r = tune(model, spec);
    const FoFilterParams bf = brute_force_tune(model, spec);
    const auto set = feasible_beta_set(spec.phase_margin);
    CHECK(std::abs(bf.beta - r.params.beta) < set.span() / 200.0);
    CHECK(std::abs(std::log(bf.lambda / r.params.lambda)) < std::log(1e6) / 200.0);
}

TEST_CASE("brute-force grid floor") {
    CHECK_THROWS_AS(brute_force_tune({1.0, 1.0, 1.0}, {3.0, 1.1345}, 100, 200), DomainError);
    CHECK_THROWS_AS(brute_force_tune({1.0, 1.0, 1.0}, {3.0, 1.1345}, 200, 100), DomainError);
}

TEST_CASE("step response matches the delayed first-order lag analytically") {
    const double lambda = 2.0, theta = 1.0, horizon = 20.0;
    const StepResponse step = step_response({lambda, 1.0}, theta, horizon, 600);
    REQUIRE(step.times.size() == 600);
    REQUIRE(step.values.size() == 600);
    for (std::size_t i = 0; i < step.times.size(); ++i) {
        const double t = step.times[i];
        const double want = t < theta ? 0.0 : 1.0 - std::exp(-(t - theta) / lambda);
        CHECK(std::abs(step.values[i] - want) < 1e-3);
    }
}

TEST_CASE("step responses of both examples honor the dead time and settle at one") {
    struct Fixture {
        FoFilterParams params;
        double theta, horizon;
    };
    for (const Fixture& f : {Fixture{{40.46, 1.043}, 40.0, 800.0},
                             Fixture{{4.623, 1.043}, 5.0, 100.0}}) {
        const StepResponse step = step_response(f.params, f.theta, f.horizon, 600);
        for (std::size_t i = 0; i < step.times.size(); ++i) {
            if (step.times[i] < f.theta) CHECK(std::abs(step.values[i]) < 5e-3);
            CHECK(step.values[i] > -0.05);
            CHECK(step.values[i] < 1.5);
        }
        CHECK(std::abs(step.values.back() - 1.0) < 1e-2);
        // strictly increasing time base
        for (std::size_t i = 1; i < step.times.size(); ++i)
            CHECK(step.times[i] > step.times[i - 1]);
    }
}

TEST_CASE("step response preconditions") {
    CHECK_THROWS_AS(step_response({40.46, 1.043}, 40.0, 100.0, 600), DomainError);
    CHECK_THROWS_AS(step_response({2.0, 1.0}, 1.0, 20.0, 400), DomainError);
    CHECK_THROWS_AS(step_response({0.0, 1.0}, 1.0, 20.0, 600), SpecError);
}

TEST_CASE("parallel step response is identical to the serial reference") {
    const auto a = step_response({4.623, 1.043}, 5.0, 100.0, 500, Exec::Serial);
    const auto b = step_response({4.623, 1.043}, 5.0, 100.0, 500, Exec::Parallel);
    for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
}

TEST_CASE("disturbance rejection probes") {
    for (const auto& [lambda, beta, theta] :
         {std::tuple{40.46, 1.043, 40.0}, std::tuple{4.623, 1.043, 5.0}}) {
        const auto rep = check_disturbance_rejection({lambda, beta}, theta);
        CHECK(rep.pass);
        CHECK(rep.probe_magnitude[2] < 1e-3);
        CHECK(rep.probe_magnitude[1] < rep.probe_magnitude[0]);
        CHECK(rep.probe_magnitude[2] < rep.probe_magnitude[1]);
        CHECK(rep.probe_omega[0] == doctest::Approx(1e-4 / theta));
    }
    CHECK_THROWS_AS(check_disturbance_rejection({0.0, 1.0}, 1.0), SpecError);
}

TEST_CASE("margin acceptance band") {
    const RobustnessSpec spec{3.0, 1.1345};
    CHECK(margins_within_spec({3.05, 1.14, 0.0, 0.0, 0.0, 0.0}, spec));
    CHECK_FALSE(margins_within_spec({3.07, 1.1345, 0.0, 0.0, 0.0, 0.0}, spec));
    CHECK_FALSE(margins_within_spec({3.0, 1.15, 0.0, 0.0, 0.0, 0.0}, spec));
}
