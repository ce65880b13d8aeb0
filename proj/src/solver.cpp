#include "foimc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "foimc/errors.hpp"
#include "foimc/verification.hpp"

namespace foimc {

namespace {

constexpr double kPi = std::numbers::pi;

void require_beta(double beta) {
    if (!(beta > 0.0 && beta < 2.0))
        throw DomainError("order beta must lie strictly inside (0, 2), got " + std::to_string(beta));
}

void require_theta(double theta) {
    if (!(theta > 0.0))
        throw DomainError("dead time must be strictly positive, got " + std::to_string(theta));
}

void validate(const SolverOptions& opts) {
    if (opts.grid_points < 100)
        throw DomainError("solver needs at least 100 grid points per interval");
    if (!(opts.refine_tol > 0.0 && opts.refine_tol <= 1e-3))
        throw DomainError("refine_tol must lie in (0, 1e-3]");
    if (opts.max_bisections < 20)
        throw DomainError("max_bisections must be at least 20");
}

const char* case_name(FeasibilityCase c) {
    switch (c) {
        case FeasibilityCase::A: return "A";
        case FeasibilityCase::B: return "B";
        case FeasibilityCase::C: return "C";
        case FeasibilityCase::D: return "D";
    }
    return "?";
}

struct GapSample {
    double omega_g;
    double omega_p;
    double lambda_a;
    double lambda_b;
    double residual_pm;
    double residual_gm;
    double gap() const { return lambda_a - lambda_b; }
    double scale() const { return std::max(lambda_a, lambda_b); }
};

// Full curve evaluation at one order; empty when the sample is infeasible
// (complex or non-positive crossover, or non-positive filter constant).
std::optional<GapSample> evaluate_gap(double beta, const RobustnessSpec& spec, double theta) {
    double wg = 0.0;
    try {
        wg = gain_crossover_freq(beta, spec.phase_margin, theta);
    } catch (const RealnessError&) {
        return std::nullopt;
    }
    if (!(wg > 0.0)) return std::nullopt;
    const double wp = phase_crossover_freq(beta, spec.gain_margin, theta);
    if (!(wp > 0.0)) return std::nullopt;
    const auto la = lambda_from_phase_margin(beta, wg, spec.phase_margin, theta);
    if (!la) return std::nullopt;
    const auto lb = lambda_from_gain_margin(beta, wp, spec.gain_margin, theta);
    if (!lb) return std::nullopt;
    return GapSample{wg, wp, la->value, lb->value, la->residual, lb->residual};
}

}  // namespace

double gain_crossover_freq(double beta, double phi_m, double theta) {
    require_beta(beta);
    require_theta(theta);
    if (!(phi_m > 0.0 && phi_m < kPi))
        throw DomainError("phase margin must lie strictly inside (0, pi) rad; got " +
                          std::to_string(phi_m));
    double c = std::sin(beta * kPi / 2.0) / (2.0 * std::sin(phi_m / 2.0));
    if (c > 1.0 + 1e-12)
        throw RealnessError("no real gain crossover at order " + std::to_string(beta) +
                            " for phase margin " + std::to_string(phi_m));
    c = std::min(c, 1.0);
    const double arc = std::acos(c);
    const double eta = beta * kPi / 2.0 + phi_m / 2.0;
    if (beta < (kPi - phi_m) / kPi)
        return (-arc - eta) / theta;  // first branch; non-positive on its whole domain
    return (-arc + kPi - eta) / theta;
}

double phase_crossover_freq(double beta, double gain_margin, double theta) {
    require_beta(beta);
    require_theta(theta);
    if (gain_margin == 1.0)
        throw SpecError("a gain margin of exactly 1 is unattainable: the crossover equations degenerate there");
    if (!(gain_margin >= 2.0))
        throw SpecError("gain margin must be at least 2 for the phase crossover to stay real; got " +
                        std::to_string(gain_margin));
    const double x = std::min(std::sin(beta * kPi / 2.0) / (gain_margin - 1.0), 1.0);
    return (kPi - std::acos(x) + kPi / 2.0 - beta * kPi / 2.0) / theta;
}

std::optional<LambdaSample> lambda_from_phase_margin(double beta, double omega_g,
                                                     double phi_m, double theta) {
    require_beta(beta);
    require_theta(theta);
    if (!(omega_g > 0.0))
        throw DomainError("gain crossover frequency must be positive, got " + std::to_string(omega_g));
    const double tw = theta * omega_g;
    const double pw = std::pow(omega_g, beta);
    const double half = beta * kPi / 2.0;
    const double num = std::sin(phi_m + tw) - std::sin(tw);
    if (!(num > 1e-14)) return std::nullopt;  // non-positive or pure rounding residue
    const double lambda = num / (pw * std::sin(half));
    const double residual =
        std::abs(1.0 + lambda * pw * std::cos(half) - std::cos(tw) + std::cos(phi_m + tw));
    return LambdaSample{lambda, residual};
}

std::optional<LambdaSample> lambda_from_gain_margin(double beta, double omega_p,
                                                    double gain_margin, double theta) {
    require_beta(beta);
    require_theta(theta);
    if (!(omega_p > 0.0))
        throw DomainError("phase crossover frequency must be positive, got " + std::to_string(omega_p));
    const double tw = theta * omega_p;
    const double pw = std::pow(omega_p, beta);
    const double half = beta * kPi / 2.0;
    const double num = (gain_margin - 1.0) * std::sin(tw);
    if (!(num > 1e-14)) return std::nullopt;  // non-positive or pure rounding residue
    const double lambda = num / (pw * std::sin(half));
    const double residual =
        std::abs(1.0 + lambda * pw * std::cos(half) - std::cos(tw) + gain_margin * std::cos(tw));
    return LambdaSample{lambda, residual};
}

std::vector<CurveGrid> sample_curves(const BetaFeasibleSet& set, const RobustnessSpec& spec,
                                     double theta, int points_per_interval, Exec exec) {
    validate(spec);
    require_theta(theta);
    if (points_per_interval < 2)
        throw DomainError("need at least 2 samples per interval");

    std::vector<CurveGrid> curves(set.intervals.size());
    for (std::size_t iv = 0; iv < set.intervals.size(); ++iv) {
        const auto [lo, hi] = set.intervals[iv];
        CurveGrid& grid = curves[iv];
        grid.assign(points_per_interval, std::nullopt);
        const double step = (hi - lo) / (points_per_interval + 1);
        auto fill = [&](int k) {
            const double beta = lo + step * (k + 1);  // strictly interior
            if (const auto s = evaluate_gap(beta, spec, theta))
                grid[k] = CurveSample{beta,        s->omega_g,     s->omega_p,    s->lambda_a,
                                      s->lambda_b, s->residual_pm, s->residual_gm};
        };
        if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
            for (int k = 0; k < points_per_interval; ++k) fill(k);
        } else {
            for (int k = 0; k < points_per_interval; ++k) fill(k);
        }
    }
    return curves;
}

TuningResult tune(const ProcessModel& model, const RobustnessSpec& spec,
                  const SolverOptions& opts) {
    validate(model);
    validate(spec);
    validate(opts);
    const double theta = model.theta;

    const BetaFeasibleSet set = feasible_beta_set(spec.phase_margin);
    const auto curves = sample_curves(set, spec, theta, opts.grid_points, opts.exec);

    std::ostringstream diag;
    diag << "feasible case " << case_name(set.case_label) << ":";
    for (const auto& iv : set.intervals) diag << " (" << iv.lo << ", " << iv.hi << ")";
    diag << "\n";
    if (spec.phase_margin == kPi / 2.0)
        diag << "phi_m = pi/2 exactly: upper order bound taken as its continuous limit 1\n";

    struct Candidate {
        double beta;
        GapSample at;
        long grid_index;
        int bisections;
    };
    std::vector<Candidate> candidates;
    long dropped = 0;

    long base = 0;
    for (std::size_t iv = 0; iv < curves.size(); ++iv) {
        const CurveGrid& grid = curves[iv];
        const double lo = set.intervals[iv].lo;
        const double step = (set.intervals[iv].hi - lo) / (opts.grid_points + 1);
        for (int k = 0; k + 1 < opts.grid_points; ++k) {
            if (!grid[k] || !grid[k + 1]) {
                dropped += !grid[k];
                continue;  // gaps bound the curve; never bracket across them
            }
            const double g0 = grid[k]->lambda_a - grid[k]->lambda_b;
            const double g1 = grid[k + 1]->lambda_a - grid[k + 1]->lambda_b;
            if (g0 == 0.0 || g0 * g1 > 0.0) continue;

            double blo = grid[k]->beta;
            double bhi = grid[k + 1]->beta;
            double sign_lo = g0;
            double beta_star = 0.5 * (blo + bhi);
            std::optional<GapSample> at;
            int it = 0;
            for (; it < opts.max_bisections; ++it) {
                beta_star = 0.5 * (blo + bhi);
                at = evaluate_gap(beta_star, spec, theta);
                if (!at) break;  // curve gap inside the bracket; abandon it
                if (std::abs(at->gap()) <= opts.refine_tol * at->scale()) break;
                if (sign_lo * at->gap() <= 0.0) {
                    bhi = beta_star;
                } else {
                    blo = beta_star;
                    sign_lo = at->gap();
                }
            }
            if (!at) {
                diag << "bracket near beta = " << beta_star << " abandoned (curve gap)\n";
                continue;
            }
            const long idx = base + std::clamp(
                static_cast<long>(std::lround((beta_star - (lo + step)) / step)),
                0L, static_cast<long>(opts.grid_points - 1));
            candidates.push_back({beta_star, *at, idx, it});
        }
        if (!grid.empty()) dropped += !grid.back();
        base += opts.grid_points;
    }
    if (dropped > 0) diag << dropped << " grid samples dropped (non-positive lambda)\n";

    if (candidates.empty())
        throw NoIntersectionError(
            "the lambda curves do not intersect for gain margin " + std::to_string(spec.gain_margin) +
            " and phase margin " + std::to_string(spec.phase_margin) +
            " rad; lowering the phase margin and/or raising the gain margin can restore an intersection");

    // Verify every refined intersection by an independent sweep and keep the
    // one with the smallest relative margin error.
    const FrequencySweep sweep = default_margin_sweep(theta);
    const Candidate* best = nullptr;
    MarginReport best_report{};
    double best_err = 0.0;
    for (const Candidate& cand : candidates) {
        const double lambda_star = 0.5 * (cand.at.lambda_a + cand.at.lambda_b);
        const MarginReport rep =
            measure_margins({lambda_star, cand.beta}, theta, sweep, opts.exec);
        const double err = std::hypot(rep.gain_margin / spec.gain_margin - 1.0,
                                      (rep.phase_margin - spec.phase_margin) / spec.phase_margin);
        if (!best || err < best_err) {
            best = &cand;
            best_report = rep;
            best_err = err;
        }
    }
    if (candidates.size() > 1)
        diag << candidates.size() << " intersections refined; reporting the one with the "
             << "smallest verified margin error\n";

    const double lambda_star = 0.5 * (best->at.lambda_a + best->at.lambda_b);
    diag << "refined in " << best->bisections << " bisections to |lambda_a - lambda_b|/lambda = "
         << std::abs(best->at.gap()) / best->at.scale() << "\n";
    diag << "companion-equation residuals: " << best->at.residual_pm << " (phase pair), "
         << best->at.residual_gm << " (gain pair)\n";
    if (!(best->at.omega_g < best->at.omega_p))
        diag << "warning: gain crossover does not precede phase crossover\n";
    if (!margins_within_spec(best_report, spec))
        diag << "warning: verified margins fall outside the acceptance band\n";

    return TuningResult{{lambda_star, best->beta},
                        best->at.omega_g,
                        best->at.omega_p,
                        best_report.gain_margin,
                        best_report.phase_margin,
                        best->grid_index,
                        diag.str()};
}

}  // namespace foimc
