#include "foimc/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "foimc/errors.hpp"

namespace foimc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGuard = 1e-12;

// Phase margin at which beta_pos_min meets beta_real_gap_lo, i.e. the root of
// tan(phi_m/2) = 1/2. Splits cases A and B.
constexpr double kCaseSplit = 0.9273;

void require_phase_margin(double phi_m) {
    if (!(phi_m > 0.0 && phi_m < kPi))
        throw SpecError("phase margin must lie strictly inside (0, pi) rad; got " +
                        std::to_string(phi_m));
}

// -sin(phi_m) / (1 - 2 sin^2(phi_m/2)); the denominator is cos(phi_m), which
// flips sign at pi/2 and makes the bound a removable singularity there.
double upper_bound_tan(double phi_m) {
    if (phi_m == kPi / 2.0)
        throw BranchError("upper positivity bound is undefined at phi_m = pi/2 exactly; "
                          "the feasible-set case split handles this point");
    const double s = std::sin(phi_m / 2.0);
    return -std::sin(phi_m) / (1.0 - 2.0 * s * s);
}

// 2 sin(phi_m/2), snapped to 1 when within a few ulps so the gap bounds land
// exactly on 1 at phi_m = pi/3.
double realness_ratio(double phi_m) {
    require_phase_margin(phi_m);
    double y = 2.0 * std::sin(phi_m / 2.0);
    if (y > 1.0 + 1e-12)
        throw DomainError("no realness gap: the gain crossover is real for every order "
                          "once the phase margin reaches pi/3");
    if (y > 1.0 - 1e-15) y = 1.0;
    return y;
}

}  // namespace

bool BetaFeasibleSet::contains(double beta) const {
    for (const auto& iv : intervals)
        if (beta > iv.lo + kGuard && beta < iv.hi - kGuard) return true;
    return false;
}

double BetaFeasibleSet::span() const {
    double total = 0.0;
    for (const auto& iv : intervals) total += iv.hi - iv.lo;
    return total;
}

double beta_pos_min(double phi_m) {
    require_phase_margin(phi_m);
    return (kPi - phi_m) / kPi;
}

double beta_pos_window_max(double phi_m) {
    require_phase_margin(phi_m);
    return (2.0 * kPi - phi_m) / kPi;
}

double beta_pos_max_low(double phi_m) {
    require_phase_margin(phi_m);
    return (2.0 / kPi) * std::atan(upper_bound_tan(phi_m));
}

double beta_pos_max_high(double phi_m) {
    require_phase_margin(phi_m);
    return (2.0 / kPi) * (kPi + std::atan(upper_bound_tan(phi_m)));
}

double beta_real_gap_lo(double phi_m) {
    return (2.0 / kPi) * std::asin(realness_ratio(phi_m));
}

double beta_real_gap_hi(double phi_m) {
    return (2.0 / kPi) * (kPi - std::asin(realness_ratio(phi_m)));
}

BetaFeasibleSet feasible_beta_set(double phi_m) {
    require_phase_margin(phi_m);
    BetaFeasibleSet set;
    if (phi_m <= kCaseSplit) {
        set.case_label = FeasibilityCase::A;
        set.intervals = {{beta_real_gap_hi(phi_m), beta_pos_max_high(phi_m)}};
    } else if (phi_m < kPi / 3.0) {
        set.case_label = FeasibilityCase::B;
        set.intervals = {{beta_pos_min(phi_m), beta_real_gap_lo(phi_m)},
                         {beta_real_gap_hi(phi_m), beta_pos_max_high(phi_m)}};
    } else if (phi_m <= kPi / 2.0) {
        set.case_label = FeasibilityCase::C;
        // At exactly pi/2 the bound has a removable singularity; its
        // continuous limit is 1.
        const double hi = (phi_m == kPi / 2.0) ? 1.0 : beta_pos_max_high(phi_m);
        set.intervals = {{beta_pos_min(phi_m), hi}};
    } else {
        set.case_label = FeasibilityCase::D;
        set.intervals = {{beta_pos_min(phi_m), beta_pos_max_low(phi_m)}};
    }
    std::erase_if(set.intervals,
                  [](const BetaInterval& iv) { return !(iv.hi - iv.lo > 2.0 * kGuard); });
    if (set.intervals.empty())
        throw SpecError("feasible order set degenerated to empty near a case boundary "
                        "(phi_m = " + std::to_string(phi_m) + ")");
    return set;
}

}  // namespace foimc
