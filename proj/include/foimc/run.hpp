#pragma once

#include <filesystem>
#include <iosfwd>

#include "foimc/solver.hpp"
#include "foimc/types.hpp"

namespace foimc {

struct EmitFlags {
    bool report = true;
    bool bode_csv = true;
    bool step_csv = true;
    bool curves_csv = true;
};

struct RunConfig {
    ProcessModel model;
    RobustnessSpec spec;  // normalized to absolute ratio / radians at parse time
    SolverOptions solver;
    std::filesystem::path output_dir = ".";
    EmitFlags emit;
    double step_horizon = 0.0;  // 0 -> 12 * max(theta, lambda^(1/beta)) after solving
    int step_samples = 600;
};

// Exit codes shared by run() and the command-line tool.
enum ExitCode : int {
    kOk = 0,
    kInvalidConfig = 2,
    kInfeasibleSpec = 3,
    kNoIntersection = 4,
    kVerificationMismatch = 5,
};

/// Parses the flat key = value config format (see README). Unit suffixes on
/// the margin keys are mandatory: gain_margin_abs or gain_margin_db, and
/// phase_margin_deg or phase_margin_rad. Throws ConfigError.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::filesystem::path& path);

/// Tunes, verifies, and writes the requested outputs (report.txt, curves.csv,
/// bode.csv, step.csv) under output_dir. Progress and failures go to log.
/// Returns an ExitCode value.
int run(const RunConfig& config, std::ostream& log);

}  // namespace foimc
