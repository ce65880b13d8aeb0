#pragma once

#include <vector>

namespace foimc {

enum class FeasibilityCase { A, B, C, D };

struct BetaInterval {
    double lo;
    double hi;
};

/// Orders beta for which the closed-form gain crossover is real and strictly
/// positive, as a union of at most two disjoint open intervals in (0, 2).
struct BetaFeasibleSet {
    std::vector<BetaInterval> intervals;  // sorted, disjoint
    FeasibilityCase case_label{FeasibilityCase::A};

    // Strict interior membership with a 1e-12 guard band at the endpoints.
    bool contains(double beta) const;
    double span() const;
};

// Boundary orders of the crossover analysis, all functions of the desired
// phase margin phi_m (radians, strictly inside (0, pi)).

/// (pi - phi_m)/pi: below this order the gain crossover is never positive.
double beta_pos_min(double phi_m);

/// (2 pi - phi_m)/pi: upper cap of the admissible phase-branch window.
/// Never active (positivity caps earlier); kept for the domain study.
double beta_pos_window_max(double phi_m);

/// Upper positivity bound on (0,1), active for phi_m > pi/2. Negative (thus
/// inactive) for phi_m < pi/2. Undefined at phi_m = pi/2 exactly.
double beta_pos_max_low(double phi_m);

/// Upper positivity bound on (1,2), active for phi_m < pi/2.
/// Undefined at phi_m = pi/2 exactly.
double beta_pos_max_high(double phi_m);

/// Realness gap: for phi_m < pi/3 the gain crossover turns complex for
/// beta in (beta_real_gap_lo, beta_real_gap_hi). Both equal 1 at phi_m = pi/3;
/// for larger phi_m there is no gap and these signal not-applicable.
double beta_real_gap_lo(double phi_m);
double beta_real_gap_hi(double phi_m);

/// Assembles the feasible order set. Case A: phi_m in (0, 0.9273]; case B:
/// (0.9273, pi/3) with two intervals; case C: [pi/3, pi/2]; case D: (pi/2, pi).
/// At phi_m = pi/2 exactly the upper bound is taken as its continuous limit 1.
BetaFeasibleSet feasible_beta_set(double phi_m);

}  // namespace foimc
