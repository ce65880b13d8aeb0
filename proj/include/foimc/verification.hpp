#pragma once

#include <vector>

#include "foimc/types.hpp"

namespace foimc {

struct FrequencySweep {
    double omega_min;  // rad/s, > 0
    double omega_max;  // rad/s, > omega_min
    int points;        // log-spaced sample count
};

/// [1e-4/theta, 1e2/theta] with 4000 points.
FrequencySweep default_margin_sweep(double theta);

struct MarginReport {
    double gain_margin;           // 1/|L| at the measured phase crossover
    double phase_margin;          // pi + arg L at the measured gain crossover, radians
    double omega_g;               // measured, rad/s
    double omega_p;               // measured, rad/s
    double residual_gain_cross;   // | |L(omega_g)| - 1 |
    double residual_phase_cross;  // | arg L(omega_p) + pi |
};

/// Open-loop response over a log-spaced grid.
std::vector<ComplexResponse> sweep_open_loop(const FoFilterParams& params, double theta,
                                             const FrequencySweep& sweep,
                                             Exec exec = Exec::Parallel);

/// Measures both margins from a sweep: omega_g is the first |L| = 1 crossing
/// from above, omega_p the first unwrapped-phase crossing of -pi; both roots
/// are refined by bisection to 1e-8 relative. The sweep must span at least
/// [1e-4/theta, 1e2/theta] with >= 2000 points.
MarginReport measure_margins(const FoFilterParams& params, double theta,
                             const FrequencySweep& sweep, Exec exec = Exec::Parallel);

/// Grid-search tuning oracle: minimizes the squared relative margin errors
/// measured by measure_margins over a beta x log-lambda grid spanning the
/// feasible set and [1e-3, 1e3] * theta^beta_mid, then sharpens the argmin
/// with local grid refinement passes of the same objective. Used in tests as
/// an independent check of the closed-form solver. Throws OracleError when
/// the best objective stays above 0.05.
FoFilterParams brute_force_tune(const ProcessModel& model, const RobustnessSpec& spec,
                                int beta_grid = 200, int lambda_grid = 200,
                                Exec exec = Exec::Parallel);

struct StepResponse {
    std::vector<double> times;   // seconds, strictly increasing from 0
    std::vector<double> values;  // unit-step response of the closed loop
};

/// Closed-loop unit-step response synthesized in the frequency domain from
/// the real part of the complementary response (no rational approximation of
/// s^beta or of the delay). horizon must cover 10x the slower of the dead
/// time and the filter time scale lambda^(1/beta); samples >= 500.
StepResponse step_response(const FoFilterParams& params, double theta, double horizon,
                           int samples, Exec exec = Exec::Parallel);

struct DisturbanceRejectionReport {
    bool pass;
    double probe_omega[3];      // 1e-4/theta, 1e-5/theta, 1e-6/theta
    double probe_magnitude[3];  // |sensitivity| at the probes
};

/// Passes when |sensitivity| decreases strictly across the probes and the
/// final value is below 1e-3.
DisturbanceRejectionReport check_disturbance_rejection(const FoFilterParams& params,
                                                       double theta);

/// Round-trip acceptance band: measured gain margin within 2% and measured
/// phase margin within 0.01 rad of the spec.
bool margins_within_spec(const MarginReport& report, const RobustnessSpec& spec);

}  // namespace foimc
