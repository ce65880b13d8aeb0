#pragma once

#include <complex>

namespace foimc {

using Complex = std::complex<double>;

// Execution policy for the data-parallel kernels. Parallel uses OpenMP when
// compiled in; every kernel fills independent slots or reduces in a fixed
// order, so both policies produce identical results.
enum class Exec { Serial, Parallel };

/// FOPTD plant k * e^{-theta s} / (tau s + 1).
struct ProcessModel {
    double k{1.0};      // process gain, k != 0
    double tau{1.0};    // time constant, seconds, tau > 0
    double theta{1.0};  // dead time, seconds, theta > 0
};

/// Desired loop robustness. Gain margin is an absolute ratio (not dB),
/// phase margin is in radians.
struct RobustnessSpec {
    double gain_margin{3.0};   // >= 2
    double phase_margin{1.0};  // in (0, pi)
};

/// Fractional-order filter 1 / (lambda s^beta + 1).
struct FoFilterParams {
    double lambda{1.0};  // seconds^beta, > 0
    double beta{1.0};    // in (0, 2)
};

/// One frequency-response sample.
struct ComplexResponse {
    double omega{0.0};  // rad/s, > 0
    Complex value{0.0, 0.0};
};

void validate(const ProcessModel& model);
void validate(const RobustnessSpec& spec);
void validate(const FoFilterParams& params);

}  // namespace foimc
