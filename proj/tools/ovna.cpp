#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ovna/errors.hpp"
#include "ovna/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitAcceptance = 2;

ovna::ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ovna::ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ovna::ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return ovna::ExperimentConfig::from_json(j);
}

int cmd_run(const std::string& config_path, const std::string& preset,
            const std::string& output_dir) {
    ovna::ExperimentConfig config = preset.empty()
                                        ? load_config(config_path)
                                        : ovna::ExperimentConfig::preset(preset);
    if (!output_dir.empty()) config.output_dir = output_dir;
    if (const char* env = std::getenv("OVNA_OUTPUT_DIR"); env && *env)
        config.output_dir = env;
    const ovna::SummaryReport report = ovna::run_scenario(config);

    std::cout << "scenario:             " << report.scenario << "\n"
              << "apc_enabled:          " << (report.apc_enabled ? "true" : "false") << "\n"
              << std::setprecision(6) << "il_std_db:            " << report.il_std_db << "\n"
              << "max_il_deviation_db:  " << report.max_il_deviation_db << "\n"
              << "min_tracking_power:   " << report.min_tracking_power << "\n";
    bool all_pass = true;
    for (const auto& [name, pass] : report.checks) {
        std::cout << "check " << name << ": " << (pass ? "pass" : "FAIL") << "\n";
        all_pass = all_pass && pass;
    }
    return all_pass ? kExitOk : kExitAcceptance;
}

int cmd_compare(const std::string& dir_a, const std::string& dir_b) {
    const ovna::RunComparison cmp = ovna::compare_runs(dir_a, dir_b);
    std::cout << std::setprecision(6);
    std::cout << "wavelength_nm,delta_il_db\n";
    for (std::size_t i = 0; i < cmp.wavelength.size(); ++i)
        std::cout << cmp.wavelength[i] * 1e9 << "," << cmp.delta_il_db[i] << "\n";
    std::cout << "il_std_a_db: " << cmp.std_a_db << "\n"
              << "il_std_b_db: " << cmp.std_b_db << "\n"
              << "std_ratio:   " << cmp.std_ratio << "\n";
    return kExitOk;
}

int cmd_validate_eq1(const std::string& config_path, int n_seeds, double tolerance) {
    ovna::SweepPlan sweep;
    if (!config_path.empty()) {
        sweep = load_config(config_path).sweep;
    } else {
        // Wide-band sweep: many birefringence decorrelation lengths per seed
        // keep the ensemble variance of the measured rate low.
        sweep.lambda_start = 1530e-9;
        sweep.lambda_stop = 1570e-9;
        sweep.sweep_rate = 100e-9;
    }
    const std::vector<double> dgd_values{0.2e-12, 0.64e-12, 2.0e-12};
    const auto rows = ovna::validate_rotation_rate(sweep, dgd_values, n_seeds);
    std::cout << std::setprecision(6)
              << "dgd_ps,predicted_rad_s,measured_rad_s,rel_error\n";
    bool ok = true;
    for (const auto& row : rows) {
        std::cout << row.dgd * 1e12 << "," << row.predicted << "," << row.measured << ","
                  << row.rel_error << "\n";
        ok = ok && std::abs(row.rel_error) <= tolerance;
    }
    std::cout << (ok ? "rotation-rate law verified" : "rotation-rate law FAILED") << " (tolerance "
              << tolerance * 100.0 << "%)\n";
    return ok ? kExitOk : kExitAcceptance;
}

int cmd_verify_report(const std::string& run_dir) {
    const auto mismatches = ovna::verify_report(run_dir);
    if (mismatches.empty()) {
        std::cout << "report verified: all statistics reproducible from the CSVs\n";
        return kExitOk;
    }
    std::cout << "report verification FAILED:\n";
    for (const auto& m : mismatches) std::cout << "  - " << m << "\n";
    return kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Swept-wavelength interferometric network analyzer simulator"};
    app.require_subcommand(1);

    std::string config_path, preset, output_dir, dir_a, dir_b, run_dir;
    int n_seeds = 20;
    double tolerance = 0.15;

    auto* run = app.add_subcommand("run", "Run a scenario and persist its artifacts");
    auto* run_cfg = run->add_option("config", config_path, "JSON config file");
    run->add_option("--preset", preset, "Use a named scenario preset instead of a file");
    run->add_option("--output-dir", output_dir, "Override the artifact directory");

    auto* compare = app.add_subcommand("compare", "Compare the metrics of two run directories");
    compare->add_option("run_a", dir_a, "First run directory")->required();
    compare->add_option("run_b", dir_b, "Second run directory")->required();

    auto* eq1 = app.add_subcommand(
        "validate-eq1", "Check the rotation-rate law against an ensemble of reference fibers");
    auto* eq1_cfg = eq1->add_option("config", config_path,
                                    "JSON config file (default: wide-band sweep)");
    eq1->add_option("--seeds", n_seeds, "Ensemble size")->check(CLI::PositiveNumber);
    eq1->add_option("--tolerance", tolerance, "Relative tolerance");

    auto* verify = app.add_subcommand("verify-report",
                                      "Recompute the report statistics from the CSVs");
    verify->add_option("run_dir", run_dir, "Run directory")->required();

    auto* schema = app.add_subcommand("print-schema", "Print the config file schema");

    try {
        app.parse(argc, argv);
        if (run->parsed()) {
            if (config_path.empty() && preset.empty())
                throw ovna::ConfigError("run: provide a config file or --preset");
            (void)run_cfg;
            return cmd_run(config_path, preset, output_dir);
        }
        if (compare->parsed()) return cmd_compare(dir_a, dir_b);
        if (eq1->parsed()) {
            (void)eq1_cfg;
            return cmd_validate_eq1(config_path, n_seeds, tolerance);
        }
        if (verify->parsed()) return cmd_verify_report(run_dir);
        if (schema->parsed()) {
            std::cout << ovna::config_schema();
            return kExitOk;
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitValidation;
    } catch (const ovna::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ovna::InvalidInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAcceptance;
    }
    return kExitValidation;
}
