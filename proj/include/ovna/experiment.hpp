#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ovna/dsp.hpp"
#include "ovna/io.hpp"
#include "ovna/synth.hpp"

namespace ovna {

/// Full description of one simulated measurement run.
struct ExperimentConfig {
    std::string scenario{"single_core_apc_on"};
    SweepPlan sweep;
    BirefringentFiberSpec reference_fiber;
    McfSpec dut;
    double base_delay{0.0};     // seconds, first channel delay offset
    double guard{0.0};          // seconds, delay-plan guard
    double aux_delay{0.0};      // seconds
    double tap_fraction{0.01};
    AdcSpec adc;
    ControllerConfig controller;
    bool apc_enabled{true};
    std::uint64_t seed{1};
    std::string output_dir{"out"};
    double lambda_cal{0.0};     // meters; 0 = mid-band
    std::size_t out_points{1500};

    /// Named desk-scale presets: single_core_apc_off, single_core_apc_on,
    /// single_core_recovery (noise-free), seven_core_map, sweep_correction.
    static ExperimentConfig preset(const std::string& name);

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    double calibration_lambda() const;

    /// Collects every violated constraint and throws a single ConfigError
    /// listing all of them.
    void validate() const;
};

struct SummaryReport {
    std::string scenario;
    bool apc_enabled{false};
    double il_std_db{0.0};            // std of normalized IL across wavelength
    double max_il_deviation_db{0.0};  // max |normalized IL - ground truth|
    double min_tracking_power{0.0};
    std::map<std::string, bool> checks;

    nlohmann::json to_json() const;
    static SummaryReport from_json(const nlohmann::json& j);
};

/// Runs the full chain (alignment, synthesis, resampling, channelization,
/// assembly, calibration, metrics) and persists: waveform container,
/// metrics/tracking/core-map/ground-truth CSVs, the config, and report.json.
/// Partial outputs are removed when the run fails. All statistics in the
/// report are recomputed from the persisted CSVs.
SummaryReport run_scenario(const ExperimentConfig& config);

struct RunComparison {
    std::vector<double> wavelength;  // meters
    std::vector<double> delta_il_db;  // A - B, normalized IL
    double std_a_db{0.0};
    double std_b_db{0.0};
    double std_ratio{0.0};  // A / B
};

/// Compares the persisted normalized-IL series of two run directories.
/// Throws InvalidInputError naming the first mismatched wavelength point.
RunComparison compare_runs(const std::filesystem::path& run_a,
                           const std::filesystem::path& run_b);

struct RotationRateRow {
    double dgd{0.0};        // seconds
    double predicted{0.0};  // radians/second
    double measured{0.0};   // radians/second, ensemble mean
    double rel_error{0.0};
};

/// Open-loop SOP rotation-rate study: for each DGD value, builds an ensemble
/// of reference fibers and compares the measured mean rate with the
/// sweep-rate x DGD prediction.
std::vector<RotationRateRow> validate_rotation_rate(const SweepPlan& sweep,
                                                    const std::vector<double>& dgd_values,
                                                    int n_seeds, int n_segments = 64);

/// Recomputes every report statistic from the persisted CSVs and compares it
/// with report.json. Returns the list of mismatched fields (empty = verified).
std::vector<std::string> verify_report(const std::filesystem::path& run_dir);

/// Human-readable description of the JSON config schema.
std::string config_schema();

}  // namespace ovna
