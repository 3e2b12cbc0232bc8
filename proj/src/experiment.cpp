#include "ovna/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ovna/errors.hpp"

namespace ovna {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double population_std(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(v.size()));
}

/// Normalized per-wavelength IL of a persisted ground-truth response,
/// ascending in wavelength to match the metrics CSV.
std::vector<double> truth_il_norm(const TransferFunctionEstimate& truth, double lambda_cal) {
    const std::size_t count = truth.h.size();
    const std::size_t cal_idx = truth.grid.nearest(kSpeedOfLight / lambda_cal);
    const double il_cal = insertion_loss_db(truth.h[cal_idx]);
    std::vector<double> out(count);
    for (std::size_t m = 0; m < count; ++m)
        out[m] = insertion_loss_db(truth.h[count - 1 - m]) - il_cal;
    return out;
}

struct RunStatistics {
    double il_std_db{0.0};
    double max_il_deviation_db{0.0};
    double min_tracking_power{0.0};
};

/// All report statistics recomputed from the persisted CSVs alone.
RunStatistics statistics_from_artifacts(const fs::path& dir, double lambda_cal) {
    const MetricsSeries metrics = read_metrics_csv(dir / "metrics.csv");
    const TransferFunctionEstimate truth = read_ground_truth_csv(dir / "ground_truth.csv");
    const TrackingTrace trace = read_tracking_csv(dir / "tracking.csv");
    if (truth.h.size() != metrics.wavelength.size())
        throw InvalidInputError("run statistics: metrics and ground truth grids differ");
    const std::vector<double> truth_norm = truth_il_norm(truth, lambda_cal);
    RunStatistics stats;
    stats.il_std_db = population_std(metrics.il_norm_db);
    for (std::size_t m = 0; m < truth_norm.size(); ++m)
        stats.max_il_deviation_db = std::max(
            stats.max_il_deviation_db, std::abs(metrics.il_norm_db[m] - truth_norm[m]));
    stats.min_tracking_power =
        *std::min_element(trace.tracking_power.begin(), trace.tracking_power.end());
    return stats;
}

LossTable ramp_loss(double lambda_start, double lambda_stop, double start_db, double stop_db) {
    return {{lambda_start, lambda_stop}, {start_db, stop_db}};
}

json loss_table_to_json(const LossTable& t) {
    json j;
    j["lambda"] = t.lambda;
    j["loss_db"] = t.loss_db;
    return j;
}

LossTable loss_table_from_json(const json& j) {
    LossTable t;
    t.lambda = j.at("lambda").get<std::vector<double>>();
    t.loss_db = j.at("loss_db").get<std::vector<double>>();
    return t;
}

}  // namespace

double ExperimentConfig::calibration_lambda() const {
    if (lambda_cal > 0.0) return lambda_cal;
    return 0.5 * (sweep.lambda_start + sweep.lambda_stop);
}

ExperimentConfig ExperimentConfig::preset(const std::string& name) {
    ExperimentConfig c;
    c.scenario = name;
    c.sweep.lambda_start = 1547.5e-9;
    c.sweep.lambda_stop = 1552.5e-9;
    c.sweep.sweep_rate = 100e-9;
    c.reference_fiber = {24, 2.0e-12, 0.0, 0};
    c.dut.n_cores = 1;
    c.dut.core_loss = {ramp_loss(c.sweep.lambda_start, c.sweep.lambda_stop, 0.0, 0.0)};
    c.dut.core_group_delays = {0.0};
    c.dut.core_dgd = 0.1e-12;
    c.dut.crosstalk_db = -300.0;
    c.base_delay = 0.15e-6;
    c.guard = 2.0e-9;
    c.aux_delay = 0.08e-6;
    c.tap_fraction = 0.01;
    c.adc = {25e6, 14, 1e-4};
    c.controller.loop_rate = 2e4;
    c.controller.dither_step = 0.02;
    c.controller.gain = 0.5;
    c.seed = 7;
    c.out_points = 1200;

    if (name == "single_core_apc_off") {
        c.apc_enabled = false;
    } else if (name == "single_core_apc_on") {
        c.apc_enabled = true;
    } else if (name == "single_core_recovery") {
        c.apc_enabled = true;
        c.adc.bits = 24;
        c.adc.noise_rms = 0.0;
        c.reference_fiber.rms_dgd_target = 0.5e-12;
        c.controller.loop_rate = 5e4;
        c.controller.dither_step = 0.005;
        c.out_points = 800;
    } else if (name == "seven_core_map") {
        c.apc_enabled = true;
        c.dut.n_cores = 7;
        c.dut.core_loss.clear();
        c.dut.core_group_delays.assign(7, 0.0);
        for (int core = 0; core < 7; ++core)
            c.dut.core_loss.push_back(ramp_loss(c.sweep.lambda_start, c.sweep.lambda_stop, 0.0,
                                                0.08 * static_cast<double>(core)));
        c.out_points = 400;
    } else if (name == "sweep_correction") {
        c.apc_enabled = true;
        c.sweep.nonlinearity = {2e8, 5e-3};
    } else {
        throw ConfigError("unknown scenario preset '" + name + "'");
    }
    return c;
}

json ExperimentConfig::to_json() const {
    json j;
    j["scenario"] = scenario;
    j["seed"] = seed;
    j["apc_enabled"] = apc_enabled;
    j["output_dir"] = output_dir;
    j["lambda_cal"] = lambda_cal;
    j["out_points"] = out_points;
    j["sweep"] = {{"lambda_start", sweep.lambda_start},
                  {"lambda_stop", sweep.lambda_stop},
                  {"sweep_rate", sweep.sweep_rate},
                  {"nonlinearity",
                   {{"amplitude_hz", sweep.nonlinearity.amplitude_hz},
                    {"period_s", sweep.nonlinearity.period_s}}}};
    json envelope = json::array();
    for (const auto& p : sweep.power_envelope)
        envelope.push_back({{"lambda", p.lambda}, {"relative", p.relative}});
    j["sweep"]["power_envelope"] = envelope;
    j["reference_fiber"] = {{"n_segments", reference_fiber.n_segments},
                            {"rms_dgd", reference_fiber.rms_dgd_target},
                            {"group_delay", reference_fiber.group_delay}};
    json loss = json::array();
    for (const auto& t : dut.core_loss) loss.push_back(loss_table_to_json(t));
    j["dut"] = {{"n_cores", dut.n_cores},
                {"crosstalk_db", dut.crosstalk_db},
                {"core_dgd", dut.core_dgd},
                {"core_group_delays", dut.core_group_delays},
                {"core_loss", loss}};
    j["interferometer"] = {{"base_delay", base_delay},
                           {"guard", guard},
                           {"aux_delay", aux_delay},
                           {"tap_fraction", tap_fraction}};
    j["adc"] = {{"sample_rate", adc.sample_rate},
                {"bits", adc.bits},
                {"noise_rms", adc.noise_rms}};
    j["controller"] = {{"loop_rate", controller.loop_rate},
                       {"dither_step", controller.dither_step},
                       {"gain", controller.gain}};
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig c;
    try {
        c.scenario = j.at("scenario").get<std::string>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.apc_enabled = j.at("apc_enabled").get<bool>();
        if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
        c.lambda_cal = j.value("lambda_cal", 0.0);
        c.out_points = j.value("out_points", std::size_t{1200});
        const auto& sw = j.at("sweep");
        c.sweep.lambda_start = sw.at("lambda_start").get<double>();
        c.sweep.lambda_stop = sw.at("lambda_stop").get<double>();
        c.sweep.sweep_rate = sw.at("sweep_rate").get<double>();
        if (sw.contains("nonlinearity")) {
            c.sweep.nonlinearity.amplitude_hz = sw.at("nonlinearity").at("amplitude_hz");
            c.sweep.nonlinearity.period_s = sw.at("nonlinearity").at("period_s");
        }
        if (sw.contains("power_envelope"))
            for (const auto& p : sw.at("power_envelope"))
                c.sweep.power_envelope.push_back(
                    {p.at("lambda").get<double>(), p.at("relative").get<double>()});
        const auto& rf = j.at("reference_fiber");
        c.reference_fiber.n_segments = rf.at("n_segments").get<int>();
        c.reference_fiber.rms_dgd_target = rf.at("rms_dgd").get<double>();
        c.reference_fiber.group_delay = rf.value("group_delay", 0.0);
        const auto& dut = j.at("dut");
        c.dut.n_cores = dut.at("n_cores").get<int>();
        c.dut.crosstalk_db = dut.value("crosstalk_db", -300.0);
        c.dut.core_dgd = dut.value("core_dgd", 0.0);
        c.dut.core_group_delays = dut.at("core_group_delays").get<std::vector<double>>();
        for (const auto& t : dut.at("core_loss")) c.dut.core_loss.push_back(loss_table_from_json(t));
        const auto& ifo = j.at("interferometer");
        c.base_delay = ifo.at("base_delay").get<double>();
        c.guard = ifo.at("guard").get<double>();
        c.aux_delay = ifo.at("aux_delay").get<double>();
        c.tap_fraction = ifo.value("tap_fraction", 0.01);
        const auto& adc = j.at("adc");
        c.adc.sample_rate = adc.at("sample_rate").get<double>();
        c.adc.bits = adc.at("bits").get<int>();
        c.adc.noise_rms = adc.value("noise_rms", 0.0);
        const auto& ctrl = j.at("controller");
        c.controller.loop_rate = ctrl.at("loop_rate").get<double>();
        c.controller.dither_step = ctrl.at("dither_step").get<double>();
        c.controller.gain = ctrl.at("gain").get<double>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return c;
}

void ExperimentConfig::validate() const {
    std::vector<std::string> problems;
    auto collect = [&](const char* what, auto&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            problems.push_back(std::string(what) + ": " + e.what());
        }
    };
    collect("sweep", [&] { sweep.validate(); });
    collect("adc", [&] { adc.validate(); });
    collect("controller", [&] { controller.validate(); });
    if (scenario.empty()) problems.push_back("scenario: name must not be empty");
    if (!(base_delay > 0.0)) problems.push_back("interferometer: base_delay must be > 0");
    if (!(guard > 0.0)) problems.push_back("interferometer: guard must be > 0");
    if (!(aux_delay > 0.0)) problems.push_back("interferometer: aux_delay must be > 0");
    if (!(tap_fraction > 0.0) || tap_fraction >= 1.0)
        problems.push_back("interferometer: tap_fraction must lie in (0, 1)");
    if (reference_fiber.n_segments < 1)
        problems.push_back("reference_fiber: n_segments must be >= 1");
    if (reference_fiber.rms_dgd_target < 0.0)
        problems.push_back("reference_fiber: rms_dgd must be >= 0");
    if (dut.n_cores < 1) problems.push_back("dut: n_cores must be >= 1");
    if (static_cast<int>(dut.core_loss.size()) != dut.n_cores)
        problems.push_back("dut: core_loss must have one table per core");
    if (static_cast<int>(dut.core_group_delays.size()) != dut.n_cores)
        problems.push_back("dut: core_group_delays must have one entry per core");
    if (dut.crosstalk_db > 0.0) problems.push_back("dut: crosstalk_db must be <= 0");
    if (dut.core_dgd < 0.0) problems.push_back("dut: core_dgd must be >= 0");
    if (out_points < 16) problems.push_back("out_points: must be >= 16");
    if (lambda_cal != 0.0 &&
        (lambda_cal < std::min(sweep.lambda_start, sweep.lambda_stop) ||
         lambda_cal > std::max(sweep.lambda_start, sweep.lambda_stop)))
        problems.push_back("lambda_cal: must lie inside the sweep band (or 0 for mid-band)");
    if (!problems.empty()) {
        std::ostringstream msg;
        msg << "invalid experiment config (" << problems.size() << " problem"
            << (problems.size() == 1 ? "" : "s") << "):";
        for (const auto& p : problems) msg << "\n  - " << p;
        throw ConfigError(msg.str());
    }
}

json SummaryReport::to_json() const {
    json j;
    j["scenario"] = scenario;
    j["apc_enabled"] = apc_enabled;
    j["il_std_db"] = il_std_db;
    j["max_il_deviation_db"] = max_il_deviation_db;
    j["min_tracking_power"] = min_tracking_power;
    j["checks"] = checks;
    return j;
}

SummaryReport SummaryReport::from_json(const json& j) {
    SummaryReport r;
    try {
        r.scenario = j.at("scenario").get<std::string>();
        r.apc_enabled = j.at("apc_enabled").get<bool>();
        r.il_std_db = j.at("il_std_db").get<double>();
        r.max_il_deviation_db = j.at("max_il_deviation_db").get<double>();
        r.min_tracking_power = j.at("min_tracking_power").get<double>();
        r.checks = j.at("checks").get<std::map<std::string, bool>>();
    } catch (const json::exception& e) {
        throw InvalidInputError(std::string("report parse error: ") + e.what());
    }
    return r;
}

SummaryReport run_scenario(const ExperimentConfig& config) {
    config.validate();
    const fs::path dir(config.output_dir);
    std::vector<fs::path> written;
    auto persist = [&](const fs::path& p, auto&& writer) {
        writer(p);
        written.push_back(p);
    };
    try {
        const double lambda_cal = config.calibration_lambda();
        const double nu_cal = kSpeedOfLight / lambda_cal;

        BirefringentFiberSpec ref_spec = config.reference_fiber;
        ref_spec.seed = config.seed;
        McfSpec dut_spec = config.dut;
        dut_spec.seed = config.seed + 1;
        const BirefringentFiber ref_fiber(ref_spec);
        const MultiCoreFiber dut(dut_spec);

        InterferometerLayout layout;
        layout.delay_plan = build_delay_plan(config.dut.n_cores, config.base_delay, config.guard);
        layout.aux_delay = config.aux_delay;
        layout.tap_fraction = config.tap_fraction;

        // Single-wavelength alignment before the sweep: the transformer is
        // solved so the reference polarization matches the expected state at
        // the calibration wavelength (both with and without feedback).
        ApcOptions apc;
        apc.enabled = config.apc_enabled;
        apc.config = config.controller;
        const JonesVector r_cal =
            (ref_fiber.jones(nu_cal) * layout.reference_launch).normalized();
        apc.initial_state =
            solve_alignment(TransformerState::standard(), r_cal, config.controller.target);
        if (config.apc_enabled) {
            // The loop runs continuously before the sweep, so it starts the
            // record already locked onto the sweep-start polarization.
            const JonesVector r_start =
                (ref_fiber.jones(config.sweep.nu_instant(0.0)) * layout.reference_launch)
                    .normalized();
            apc.initial_state =
                solve_alignment(apc.initial_state, r_start, config.controller.target);
        }

        SynthesisResult synth =
            synthesize(config.sweep, layout, ref_fiber, dut, config.adc, apc, config.seed + 2);

        const ResampledSweep resampled =
            aux_phase_resample(synth.record, config.aux_delay);
        const auto channels =
            plan_channels(layout.delay_plan, config.dut.core_group_delays);
        const WindowSpec window{config.guard / 2.0, 0.25};
        const auto responses = channelize(resampled, channels, window, config.out_points);
        const FrequencyGrid out_grid = decimate_grid(resampled.grid, config.out_points);
        TransferFunctionEstimate estimate =
            assemble_transfer(responses, layout.delay_plan, out_grid);
        estimate = calibrate(estimate, dut_transfer(dut_spec, nu_cal).entries, lambda_cal);
        const MetricsSeries metrics = compute_metrics(estimate, lambda_cal);

        TransferFunctionEstimate truth;
        truth.grid = out_grid;
        truth.n_channels = 2 * config.dut.n_cores;
        truth.h.reserve(out_grid.count);
        for (std::size_t m = 0; m < out_grid.count; ++m)
            truth.h.push_back(dut.transfer(out_grid.at(m)).entries);

        std::vector<double> map_wavelength;
        const auto core_rows = per_core_il_norm_db(estimate, lambda_cal, map_wavelength);

        persist(dir / "waveform.ovna",
                [&](const fs::path& p) { write_waveform(p, synth.record); });
        written.push_back(dir / "waveform.ovna.meta");
        persist(dir / "metrics.csv",
                [&](const fs::path& p) { write_metrics_csv(p, metrics); });
        persist(dir / "tracking.csv",
                [&](const fs::path& p) { write_tracking_csv(p, synth.trace); });
        persist(dir / "core_map.csv", [&](const fs::path& p) {
            write_core_map_csv(p, map_wavelength, core_rows);
        });
        persist(dir / "ground_truth.csv",
                [&](const fs::path& p) { write_ground_truth_csv(p, truth); });

        // The persisted config omits the output directory so identical runs
        // into different directories stay byte-identical.
        json config_json = config.to_json();
        config_json.erase("output_dir");
        persist(dir / "config.json", [&](const fs::path& p) {
            atomic_write(p, config_json.dump(2) + "\n");
        });

        // Every report number comes from the persisted CSVs, so the report is
        // reproducible from the artifacts alone.
        const RunStatistics stats = statistics_from_artifacts(dir, lambda_cal);
        SummaryReport report;
        report.scenario = config.scenario;
        report.apc_enabled = config.apc_enabled;
        report.il_std_db = stats.il_std_db;
        report.max_il_deviation_db = stats.max_il_deviation_db;
        report.min_tracking_power = stats.min_tracking_power;
        if (config.scenario == "single_core_apc_off")
            report.checks["max_il_deviation_ge_3db"] = stats.max_il_deviation_db >= 3.0;
        if (config.apc_enabled && config.scenario != "sweep_correction")
            report.checks["max_il_deviation_le_0.5db"] = stats.max_il_deviation_db <= 0.5;
        if (config.scenario == "seven_core_map")
            report.checks["core_map_has_7_rows"] = core_rows.size() == 7;

        persist(dir / "report.json", [&](const fs::path& p) {
            atomic_write(p, report.to_json().dump(2) + "\n");
        });
        return report;
    } catch (...) {
        std::error_code ec;
        for (const auto& p : written) fs::remove(p, ec);
        throw;
    }
}

RunComparison compare_runs(const fs::path& run_a, const fs::path& run_b) {
    const MetricsSeries a = read_metrics_csv(run_a / "metrics.csv");
    const MetricsSeries b = read_metrics_csv(run_b / "metrics.csv");
    if (a.wavelength.size() != b.wavelength.size())
        throw InvalidInputError("compare_runs: wavelength grids have different lengths (" +
                                std::to_string(a.wavelength.size()) + " vs " +
                                std::to_string(b.wavelength.size()) + ")");
    for (std::size_t i = 0; i < a.wavelength.size(); ++i) {
        const double tol = 1e-9 * std::abs(a.wavelength[i]);
        if (std::abs(a.wavelength[i] - b.wavelength[i]) > tol) {
            std::ostringstream msg;
            msg << "compare_runs: wavelength grids differ at index " << i << " ("
                << a.wavelength[i] * 1e9 << " nm vs " << b.wavelength[i] * 1e9 << " nm)";
            throw InvalidInputError(msg.str());
        }
    }
    RunComparison cmp;
    cmp.wavelength = a.wavelength;
    cmp.delta_il_db.resize(a.wavelength.size());
    for (std::size_t i = 0; i < a.wavelength.size(); ++i)
        cmp.delta_il_db[i] = a.il_norm_db[i] - b.il_norm_db[i];
    cmp.std_a_db = population_std(a.il_norm_db);
    cmp.std_b_db = population_std(b.il_norm_db);
    cmp.std_ratio = cmp.std_b_db > 0.0
                        ? cmp.std_a_db / cmp.std_b_db
                        : std::numeric_limits<double>::infinity();
    return cmp;
}

std::vector<RotationRateRow> validate_rotation_rate(const SweepPlan& sweep,
                                                    const std::vector<double>& dgd_values,
                                                    int n_seeds, int n_segments) {
    sweep.validate();
    if (n_seeds < 1) throw InvalidInputError("validate_rotation_rate: need >= 1 seed");
    const double lambda_mid = 0.5 * (sweep.lambda_start + sweep.lambda_stop);
    const double gamma = sweep_rate_hz(sweep, lambda_mid);
    const double nu_lo = kSpeedOfLight / std::max(sweep.lambda_start, sweep.lambda_stop);
    const double nu_hi = kSpeedOfLight / std::min(sweep.lambda_start, sweep.lambda_stop);
    const JonesVector launch{cdouble(1.0, 0.0), cdouble(0.0, 0.0)};

    std::vector<RotationRateRow> rows;
    for (double dgd : dgd_values) {
        RotationRateRow row;
        row.dgd = dgd;
        row.predicted = compute_rotation_rate(gamma, dgd);
        double sum = 0.0;
        for (int s = 0; s < n_seeds; ++s) {
            const BirefringentFiber fiber(
                {n_segments, dgd, 0.0, static_cast<std::uint64_t>(s) + 1});
            sum += measure_sop_rotation_rate(fiber, launch, nu_lo, nu_hi, gamma);
        }
        row.measured = sum / static_cast<double>(n_seeds);
        row.rel_error = row.predicted != 0.0
                            ? (row.measured - row.predicted) / row.predicted
                            : row.measured;
        rows.push_back(row);
    }
    return rows;
}

std::vector<std::string> verify_report(const fs::path& run_dir) {
    std::ifstream report_in(run_dir / "report.json");
    if (!report_in)
        throw InvalidInputError("verify_report: cannot open " +
                                (run_dir / "report.json").string());
    json report_json;
    report_in >> report_json;
    const SummaryReport report = SummaryReport::from_json(report_json);

    std::ifstream config_in(run_dir / "config.json");
    if (!config_in)
        throw InvalidInputError("verify_report: cannot open " +
                                (run_dir / "config.json").string());
    json config_json;
    config_in >> config_json;
    const ExperimentConfig config = ExperimentConfig::from_json(config_json);

    const RunStatistics stats = statistics_from_artifacts(run_dir, config.calibration_lambda());
    std::vector<std::string> mismatches;
    auto check = [&](const char* field, double reported, double recomputed) {
        const double tol = 1e-12 * std::max(1.0, std::abs(recomputed));
        if (std::abs(reported - recomputed) > tol) {
            std::ostringstream msg;
            msg << field << ": report " << reported << " vs recomputed " << recomputed;
            mismatches.push_back(msg.str());
        }
    };
    check("il_std_db", report.il_std_db, stats.il_std_db);
    check("max_il_deviation_db", report.max_il_deviation_db, stats.max_il_deviation_db);
    check("min_tracking_power", report.min_tracking_power, stats.min_tracking_power);
    return mismatches;
}

std::string config_schema() {
    return R"(Experiment config schema (JSON, version 1)

Top level:
  scenario      string   scenario label; presets: single_core_apc_off,
                         single_core_apc_on, single_core_recovery,
                         seven_core_map, sweep_correction
  seed          integer  master seed; derives the reference-fiber seed (seed),
                         the device seed (seed+1) and the noise seed (seed+2)
  apc_enabled   bool     closed-loop polarization tracking on/off
  output_dir    string   artifact directory (CLI/environment may override)
  lambda_cal    number   calibration wavelength in meters; 0 = mid-band
  out_points    integer  wavelength samples in the recovered response (>= 16)

sweep:
  lambda_start, lambda_stop   meters
  sweep_rate                  meters/second
  nonlinearity { amplitude_hz, period_s }   sinusoidal tuning error
  power_envelope [ { lambda, relative } ]   relative source power (optional)

reference_fiber:
  n_segments    integer  birefringent segments (>= 1)
  rms_dgd       seconds  target RMS differential group delay
  group_delay   seconds  bulk delay of the reference path

dut:
  n_cores            integer
  crosstalk_db       number (<= 0; <= -300 disables coupling)
  core_dgd           seconds, per-core birefringence
  core_group_delays  [seconds], one per core
  core_loss          [ { lambda: [m...], loss_db: [dB...] } ], one per core

interferometer:
  base_delay    seconds  first channel delay offset
  guard         seconds  minimum channel separation (window width = guard)
  aux_delay     seconds  auxiliary interferometer delay
  tap_fraction  (0, 1)   tracking tap power fraction

adc:
  sample_rate   Hz
  bits          integer in [8, 24]
  noise_rms     relative to full scale

controller:
  loop_rate     Hz
  dither_step   radians in (0, 0.5)
  gain          > 0

Artifacts per run: waveform.ovna (+ .meta sidecar), metrics.csv,
tracking.csv, core_map.csv, ground_truth.csv, config.json, report.json.
)";
}

}  // namespace ovna
