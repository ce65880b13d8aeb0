#include "foimc/run.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "foimc/errors.hpp"
#include "foimc/verification.hpp"

namespace foimc {

namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw ConfigError("key '" + key + "': cannot parse number from '" + value + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("key '" + key + "': expected true/false, got '" + value + "'");
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

}  // namespace

RunConfig parse_config(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        if (!kv.emplace(key, value).second)
            throw ConfigError("duplicate key '" + key + "'");
    }

    RunConfig cfg;
    auto take = [&](const char* key) {
        auto it = kv.find(key);
        if (it == kv.end()) return std::string();
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto take_required = [&](const char* key) {
        std::string v = take(key);
        if (v.empty()) throw ConfigError("missing required key '" + std::string(key) + "'");
        return v;
    };

    cfg.model.k = parse_number("k", take_required("k"));
    cfg.model.tau = parse_number("tau", take_required("tau"));
    cfg.model.theta = parse_number("theta", take_required("theta"));

    const std::string gm_abs = take("gain_margin_abs");
    const std::string gm_db = take("gain_margin_db");
    if (gm_abs.empty() == gm_db.empty())
        throw ConfigError("specify exactly one of gain_margin_abs or gain_margin_db");
    cfg.spec.gain_margin = gm_abs.empty()
                               ? std::pow(10.0, parse_number("gain_margin_db", gm_db) / 20.0)
                               : parse_number("gain_margin_abs", gm_abs);

    const std::string pm_deg = take("phase_margin_deg");
    const std::string pm_rad = take("phase_margin_rad");
    if (pm_deg.empty() == pm_rad.empty())
        throw ConfigError("specify exactly one of phase_margin_deg or phase_margin_rad");
    cfg.spec.phase_margin = pm_deg.empty()
                                ? parse_number("phase_margin_rad", pm_rad)
                                : parse_number("phase_margin_deg", pm_deg) * kPi / 180.0;

    if (std::string v = take("grid_points"); !v.empty())
        cfg.solver.grid_points = static_cast<int>(parse_number("grid_points", v));
    if (std::string v = take("refine_tol"); !v.empty())
        cfg.solver.refine_tol = parse_number("refine_tol", v);
    if (std::string v = take("max_bisections"); !v.empty())
        cfg.solver.max_bisections = static_cast<int>(parse_number("max_bisections", v));
    if (std::string v = take("output_dir"); !v.empty()) cfg.output_dir = v;
    if (std::string v = take("emit_report"); !v.empty())
        cfg.emit.report = parse_bool("emit_report", v);
    if (std::string v = take("emit_bode_csv"); !v.empty())
        cfg.emit.bode_csv = parse_bool("emit_bode_csv", v);
    if (std::string v = take("emit_step_csv"); !v.empty())
        cfg.emit.step_csv = parse_bool("emit_step_csv", v);
    if (std::string v = take("emit_curves_csv"); !v.empty())
        cfg.emit.curves_csv = parse_bool("emit_curves_csv", v);
    if (std::string v = take("step_horizon"); !v.empty())
        cfg.step_horizon = parse_number("step_horizon", v);
    if (std::string v = take("step_samples"); !v.empty())
        cfg.step_samples = static_cast<int>(parse_number("step_samples", v));

    if (!kv.empty()) throw ConfigError("unknown key '" + kv.begin()->first + "'");
    return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_config(in);
}

namespace {

std::ofstream open_output(const std::filesystem::path& dir, const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + (dir / name).string());
    return out;
}

void write_curves_csv(std::ofstream out, const std::vector<CurveGrid>& curves) {
    out << "beta,omega_g,omega_p,lambda_a,lambda_b\n";
    for (const CurveGrid& grid : curves)
        for (const auto& s : grid)
            if (s)
                out << num(s->beta) << ',' << num(s->omega_g) << ',' << num(s->omega_p) << ','
                    << num(s->lambda_a) << ',' << num(s->lambda_b) << '\n';
}

void write_bode_csv(std::ofstream out, const FoFilterParams& params, double theta, Exec exec) {
    const auto resp = sweep_open_loop(params, theta, default_margin_sweep(theta), exec);
    out << "omega,mag_db,phase_deg\n";
    double phase = std::arg(resp.front().value);
    double prev_raw = phase;
    for (const auto& r : resp) {
        const double raw = std::arg(r.value);
        phase += std::remainder(raw - prev_raw, 2.0 * kPi);
        prev_raw = raw;
        out << num(r.omega) << ',' << num(20.0 * std::log10(std::abs(r.value))) << ','
            << num(phase * 180.0 / kPi) << '\n';
    }
}

void write_step_csv(std::ofstream out, const StepResponse& step) {
    out << "t,y\n";
    for (std::size_t i = 0; i < step.times.size(); ++i)
        out << num(step.times[i]) << ',' << num(step.values[i]) << '\n';
}

}  // namespace

int run(const RunConfig& config, std::ostream& log) {
    try {
        if (config.solver.grid_points < 100 || !(config.solver.refine_tol > 0.0) ||
            config.solver.refine_tol > 1e-3 || config.solver.max_bisections < 20)
            throw ConfigError("solver options out of range: need grid_points >= 100, "
                              "refine_tol in (0, 1e-3], max_bisections >= 20");
        if (config.step_samples < 500)
            throw ConfigError("step_samples must be at least 500");
    } catch (const ConfigError& e) {
        log << "invalid config: " << e.what() << "\n";
        return kInvalidConfig;
    }

    BetaFeasibleSet set;
    try {
        validate(config.model);
        validate(config.spec);
        set = feasible_beta_set(config.spec.phase_margin);
    } catch (const Error& e) {
        log << "infeasible spec: " << e.what() << "\n";
        return kInfeasibleSpec;
    }

    TuningResult result;
    try {
        result = tune(config.model, config.spec, config.solver);
    } catch (const NoIntersectionError& e) {
        log << "no intersection: " << e.what() << "\n";
        return kNoIntersection;
    } catch (const Error& e) {
        log << "tuning failed: " << e.what() << "\n";
        return kInfeasibleSpec;
    }

    const double theta = config.model.theta;
    const FoFilterParams params = result.params;
    const auto rejection = check_disturbance_rejection(params, theta);
    const double horizon = config.step_horizon > 0.0
                               ? config.step_horizon
                               : 12.0 * std::max(theta, std::pow(params.lambda, 1.0 / params.beta));

    try {
        std::filesystem::create_directories(config.output_dir);

        if (config.emit.report) {
            std::ofstream out = open_output(config.output_dir, "report.txt");
            out << "FO-IMC tuning report\n";
            out << "plant: k = " << num(config.model.k) << ", tau = " << num(config.model.tau)
                << " s, theta = " << num(theta) << " s\n";
            out << "targets: gain margin = " << num(config.spec.gain_margin) << " ("
                << num(20.0 * std::log10(config.spec.gain_margin)) << " dB), phase margin = "
                << num(config.spec.phase_margin) << " rad ("
                << num(config.spec.phase_margin * 180.0 / kPi) << " deg)\n";
            out << "feasible order intervals (case " << case_name(set.case_label) << "):";
            for (const auto& iv : set.intervals)
                out << " (" << num(iv.lo) << ", " << num(iv.hi) << ")";
            out << "\n";
            out << "solution:\n";
            out << "  beta    = " << num(params.beta) << "\n";
            out << "  lambda  = " << num(params.lambda) << "\n";
            out << "  omega_g = " << num(result.omega_g) << " rad/s\n";
            out << "  omega_p = " << num(result.omega_p) << " rad/s\n";
            out << "controller: Q(s) = (" << num(config.model.tau) << " s + 1) / ("
                << num(config.model.k) << " (" << num(params.lambda) << " s^" << num(params.beta)
                << " + 1))\n";
            out << "verification:\n";
            out << "  measured gain margin  = " << num(result.achieved_gm) << " (error "
                << num(100.0 * (result.achieved_gm / config.spec.gain_margin - 1.0)) << " %)\n";
            out << "  measured phase margin = " << num(result.achieved_pm) << " rad (error "
                << num(result.achieved_pm - config.spec.phase_margin) << " rad)\n";
            out << "disturbance rejection: " << (rejection.pass ? "PASS" : "FAIL")
                << " (|sensitivity| =";
            for (double m : rejection.probe_magnitude) out << " " << num(m);
            out << " at omega =";
            for (double w : rejection.probe_omega) out << " " << num(w);
            out << " rad/s)\n";
            out << "diagnostics:\n" << result.diagnostics;
        }
        if (config.emit.curves_csv)
            write_curves_csv(open_output(config.output_dir, "curves.csv"),
                             sample_curves(set, config.spec, theta, config.solver.grid_points,
                                           config.solver.exec));
        if (config.emit.bode_csv)
            write_bode_csv(open_output(config.output_dir, "bode.csv"), params, theta,
                           config.solver.exec);
        if (config.emit.step_csv)
            write_step_csv(open_output(config.output_dir, "step.csv"),
                           step_response(params, theta, horizon, config.step_samples,
                                         config.solver.exec));
    } catch (const Error& e) {
        log << "output failed: " << e.what() << "\n";
        return kInvalidConfig;
    } catch (const std::filesystem::filesystem_error& e) {
        log << "output failed: " << e.what() << "\n";
        return kInvalidConfig;
    }

    log << "beta = " << num(params.beta) << ", lambda = " << num(params.lambda)
        << ", omega_g = " << num(result.omega_g) << ", omega_p = " << num(result.omega_p) << "\n";

    const MarginReport achieved{result.achieved_gm, result.achieved_pm,
                                result.omega_g,     result.omega_p,
                                0.0,                0.0};
    if (!margins_within_spec(achieved, config.spec)) {
        log << "verification mismatch: measured margins (" << num(result.achieved_gm) << ", "
            << num(result.achieved_pm) << " rad) fall outside the 2% / 0.01 rad band\n";
        return kVerificationMismatch;
    }
    return kOk;
}

}  // namespace foimc
