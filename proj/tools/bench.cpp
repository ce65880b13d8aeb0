// Wall-clock comparison of the serial reference kernels against the OpenMP
// paths, with a result check per kernel. Usage: foimc-bench [repetitions]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "foimc/solver.hpp"
#include "foimc/verification.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double time_ms(int reps, F&& body) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        body();
        const auto t1 = Clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void report(const char* kernel, double serial_ms, double parallel_ms, double max_diff) {
    std::printf("%-16s %10.2f ms %10.2f ms %7.2fx   max|diff| = %g\n", kernel, serial_ms,
                parallel_ms, serial_ms / parallel_ms, max_diff);
}

}  // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 3;
    const foimc::RobustnessSpec spec{3.0, 1.1345};
    const foimc::ProcessModel model{0.43, 148.0, 40.0};
    const foimc::FoFilterParams params{40.46, 1.043};
    const double theta = model.theta;

    std::printf("%-16s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    {
        const auto set = foimc::feasible_beta_set(spec.phase_margin);
        std::vector<foimc::CurveGrid> a, b;
        const double s = time_ms(reps, [&] {
            a = foimc::sample_curves(set, spec, theta, 200000, foimc::Exec::Serial);
        });
        const double p = time_ms(reps, [&] {
            b = foimc::sample_curves(set, spec, theta, 200000, foimc::Exec::Parallel);
        });
        double diff = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t k = 0; k < a[i].size(); ++k)
                if (a[i][k] && b[i][k])
                    diff = std::max(diff, std::abs(a[i][k]->lambda_a - b[i][k]->lambda_a));
        report("curve sampling", s, p, diff);
    }
    {
        const foimc::FrequencySweep sweep{1e-4 / theta, 1e2 / theta, 400000};
        std::vector<foimc::ComplexResponse> a, b;
        const double s = time_ms(reps, [&] {
            a = foimc::sweep_open_loop(params, theta, sweep, foimc::Exec::Serial);
        });
        const double p = time_ms(reps, [&] {
            b = foimc::sweep_open_loop(params, theta, sweep, foimc::Exec::Parallel);
        });
        double diff = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            diff = std::max(diff, std::abs(a[i].value - b[i].value));
        report("margin sweep", s, p, diff);
    }
    {
        foimc::StepResponse a, b;
        const double s = time_ms(reps, [&] {
            a = foimc::step_response(params, theta, 800.0, 4000, foimc::Exec::Serial);
        });
        const double p = time_ms(reps, [&] {
            b = foimc::step_response(params, theta, 800.0, 4000, foimc::Exec::Parallel);
        });
        double diff = 0.0;
        for (std::size_t i = 0; i < a.values.size(); ++i)
            diff = std::max(diff, std::abs(a.values[i] - b.values[i]));
        report("step response", s, p, diff);
    }
    {
        foimc::FoFilterParams a{}, b{};
        const double s = time_ms(1, [&] {
            a = foimc::brute_force_tune(model, spec, 200, 200, foimc::Exec::Serial);
        });
        const double p = time_ms(1, [&] {
            b = foimc::brute_force_tune(model, spec, 200, 200, foimc::Exec::Parallel);
        });
        report("brute force", s, p,
               std::max(std::abs(a.lambda - b.lambda), std::abs(a.beta - b.beta)));
    }
    return 0;
}
