#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "foimc/errors.hpp"
#include "foimc/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Fractional-order IMC filter tuning for FOPTD plants: computes the "
                 "(lambda, beta) pair meeting a gain/phase margin spec, verifies it by "
                 "frequency sweep, and writes report plus plot data"};

    std::string config_path;
    std::string out_dir;
    bool no_report = false, no_bode = false, no_step = false, no_curves = false;
    bool serial = false;
    bool verbose = false;
    app.add_option("config", config_path, "path to the key = value config file")->required();
    app.add_option("-o,--out", out_dir, "output directory (overrides output_dir in the config)");
    app.add_flag("--no-report", no_report, "skip report.txt");
    app.add_flag("--no-bode", no_bode, "skip bode.csv");
    app.add_flag("--no-step", no_step, "skip step.csv");
    app.add_flag("--no-curves", no_curves, "skip curves.csv");
    app.add_flag("--serial", serial, "disable the OpenMP kernels");
    app.add_flag("-v,--verbose", verbose, "echo the report to stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // 0 for --help/--version
        return code == 0 ? 0 : foimc::kInvalidConfig;
    }

    foimc::RunConfig config;
    try {
        config = foimc::parse_config_file(config_path);
    } catch (const foimc::ConfigError& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return foimc::kInvalidConfig;
    }
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (no_report) config.emit.report = false;
    if (no_bode) config.emit.bode_csv = false;
    if (no_step) config.emit.step_csv = false;
    if (no_curves) config.emit.curves_csv = false;
    if (serial) config.solver.exec = foimc::Exec::Serial;

    const int status = foimc::run(config, std::cerr);
    if (verbose && status != foimc::kInvalidConfig) {
        std::ifstream report(config.output_dir / "report.txt");
        if (report) std::cout << report.rdbuf();
    }
    return status;
}
