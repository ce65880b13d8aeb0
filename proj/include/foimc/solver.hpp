#pragma once

#include <optional>
#include <string>
#include <vector>

#include "foimc/feasibility.hpp"
#include "foimc/types.hpp"

namespace foimc {

/// One order sample of the two filter-constant curves.
struct CurveSample {
    double beta;
    double omega_g;      // rad/s, > 0
    double omega_p;      // rad/s, > 0
    double lambda_a;     // from the phase-margin pair, > 0
    double lambda_b;     // from the gain-margin pair, > 0
    double residual_pm;  // companion-equation residual of lambda_a
    double residual_gm;  // companion-equation residual of lambda_b
};

struct SolverOptions {
    int grid_points = 2000;     // samples per feasible interval, >= 100
    double refine_tol = 1e-10;  // on |lambda_a - lambda_b| / max(lambda_a, lambda_b), in (0, 1e-3]
    int max_bisections = 80;    // >= 20
    Exec exec = Exec::Parallel;
};

struct TuningResult {
    FoFilterParams params;
    double omega_g;          // rad/s, at the refined intersection
    double omega_p;          // rad/s
    double achieved_gm;      // measured by frequency sweep, absolute ratio
    double achieved_pm;      // measured, radians
    long grid_index;         // sample index nearest the refined intersection
    std::string diagnostics;
};

/// Closed-form gain crossover for the margin-pair loop. Piecewise: below
/// beta_pos_min the first branch applies (provably non-positive there),
/// above it the second. Throws RealnessError when no real solution exists.
double gain_crossover_freq(double beta, double phi_m, double theta);

/// Closed-form phase crossover; real and positive for every beta in (0,2)
/// once gain_margin >= 2.
double phase_crossover_freq(double beta, double gain_margin, double theta);

struct LambdaSample {
    double value;
    double residual;  // companion real-part equation, ~0 for consistent inputs
};

/// Filter constant satisfying the phase-margin condition at omega_g.
/// Empty when the computed constant is non-positive (sample infeasible).
std::optional<LambdaSample> lambda_from_phase_margin(double beta, double omega_g,
                                                     double phi_m, double theta);

/// Filter constant satisfying the gain-margin condition at omega_p.
std::optional<LambdaSample> lambda_from_gain_margin(double beta, double omega_p,
                                                    double gain_margin, double theta);

// Sampled curves over one feasible interval; empty slots are samples dropped
// for non-positive lambda and act as gaps when scanning for intersections.
using CurveGrid = std::vector<std::optional<CurveSample>>;

std::vector<CurveGrid> sample_curves(const BetaFeasibleSet& set, const RobustnessSpec& spec,
                                     double theta, int points_per_interval,
                                     Exec exec = Exec::Parallel);

/// Full tuning pass: feasible set, curve sampling, sign-change detection on
/// lambda_a - lambda_b, bisection refinement, and sweep-based verification of
/// the achieved margins. Throws NoIntersectionError when the curves never
/// cross (the usual remedy is a lower phase margin and/or higher gain margin).
TuningResult tune(const ProcessModel& model, const RobustnessSpec& spec,
                  const SolverOptions& opts = {});

}  // namespace foimc
