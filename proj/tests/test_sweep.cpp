#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "ovna/synth.hpp"

using namespace ovna;

namespace {

SweepPlan small_sweep() {
    SweepPlan plan;
    plan.lambda_start = 1549.5e-9;
    plan.lambda_stop = 1550.5e-9;
    plan.sweep_rate = 100e-9;
    return plan;
}

InterferometerLayout single_channel_layout() {
    InterferometerLayout layout;
    layout.delay_plan = build_delay_plan(1, 1.0e-7, 2e-9);
    layout.aux_delay = 0.05e-6;
    return layout;
}

McfSpec unit_dut() {
    McfSpec spec;
    spec.n_cores = 1;
    spec.core_loss.assign(1, LossTable{});
    spec.core_group_delays.assign(1, 0.0);
    spec.seed = 13;
    return spec;
}

/// Largest-|X|-bin frequency of a windowed segment, Hz.
double segment_peak_frequency(const std::vector<float>& x, double fs, std::size_t begin,
                              std::size_t len) {
    std::vector<std::complex<double>> acc(len / 2, {0.0, 0.0});
    // Direct DFT of the short segment (lengths used here are small).
    for (std::size_t k = 1; k < len / 2; ++k) {
        std::complex<double> s{0.0, 0.0};
        for (std::size_t n = 0; n < len; ++n) {
            const double w = 0.5 - 0.5 * std::cos(2.0 * kPi * n / (len - 1.0));
            s += w * static_cast<double>(x[begin + n]) *
                 std::polar(1.0, -2.0 * kPi * static_cast<double>(k * n) / len);
        }
        acc[k] = s;
    }
    std::size_t best = 1;
    for (std::size_t k = 2; k < acc.size(); ++k)
        if (std::abs(acc[k]) > std::abs(acc[best])) best = k;
    return static_cast<double>(best) * fs / static_cast<double>(len);
}

}  // namespace

TEST_CASE("sweep rate conversion to Hz/s") {
    SweepPlan plan;
    plan.lambda_start = 1530e-9;
    plan.lambda_stop = 1570e-9;
    plan.sweep_rate = 100e-9;
    CHECK(sweep_rate_hz(plan, 1550e-9) == doctest::Approx(1.248e13).epsilon(2e-3));

    plan.sweep_rate = 0.0;
    CHECK(sweep_rate_hz(plan, 1550e-9) == 0.0);

    plan.sweep_rate = 100e-9;
    const double ratio = sweep_rate_hz(plan, 1530e-9) / sweep_rate_hz(plan, 1570e-9);
    CHECK(ratio == doctest::Approx((1570.0 / 1530.0) * (1570.0 / 1530.0)).epsilon(1e-12));
}

TEST_CASE("fringe frequency is the sweep-rate / delay product") {
    CHECK(fringe_frequency(1.248e13, 1e-7) == doctest::Approx(1.248e6).epsilon(1e-12));
    CHECK(fringe_frequency(1.248e13, 0.0) == 0.0);
    CHECK(fringe_frequency(1.248e13, 2e-6) == doctest::Approx(24.96e6).epsilon(1e-12));
    CHECK(fringe_frequency(-1.248e13, 1e-7) == doctest::Approx(1.248e6).epsilon(1e-12));
}

TEST_CASE("sweep plan validation") {
    SweepPlan plan = small_sweep();
    CHECK_NOTHROW(plan.validate());
    plan.lambda_stop = plan.lambda_start;
    CHECK_THROWS_AS(plan.validate(), ConfigError);
    plan = small_sweep();
    plan.sweep_rate = 0.0;
    CHECK_THROWS_AS(plan.validate(), ConfigError);
    plan = small_sweep();
    plan.power_envelope = {{1549.5e-9, 1.0}, {1550.5e-9, 1.5}};
    CHECK_THROWS_AS(plan.validate(), ConfigError);
}

TEST_CASE("adc validation enforces bit depth bounds") {
    AdcSpec adc{10e6, 16, 0.0};
    CHECK_NOTHROW(adc.validate());
    adc.bits = 7;
    CHECK_THROWS_AS(adc.validate(), ConfigError);
    adc.bits = 25;
    CHECK_THROWS_AS(adc.validate(), ConfigError);
    adc = {0.0, 16, 0.0};
    CHECK_THROWS_AS(adc.validate(), ConfigError);
}

TEST_CASE("no-birefringence synthesis has a flat beat envelope") {
    const SweepPlan plan = small_sweep();
    const InterferometerLayout layout = single_channel_layout();
    const BirefringentFiberSpec ref{1, 0.0, 0.0, 2};
    const AdcSpec adc{10e6, 24, 0.0};
    const SynthesisResult out =
        synthesize(plan, layout, ref, unit_dut(), adc, ApcOptions{});

    // Combined X/Y beat power per window; no fading means a flat profile.
    const auto env_x = envelope(out.record.x, adc.sample_rate, plan, 2e-4, 1e5);
    const auto env_y = envelope(out.record.y, adc.sample_rate, plan, 2e-4, 1e5);
    std::vector<double> total(env_x.size());
    for (std::size_t i = 0; i < env_x.size(); ++i)
        total[i] = std::sqrt(env_x[i].rms * env_x[i].rms + env_y[i].rms * env_y[i].rms);
    const auto [lo, hi] = std::minmax_element(total.begin(), total.end());
    CHECK(*hi / *lo < 1.01);
}

TEST_CASE("fast reference SOP rotation with the loop open causes deep fading dips") {
    const SweepPlan plan = small_sweep();
    const InterferometerLayout layout = single_channel_layout();
    // SOP arc across the 1 nm band: 2 pi T dnu ~ 4 pi.
    const BirefringentFiberSpec ref{24, 16e-12, 0.0, 6};
    const AdcSpec adc{10e6, 24, 0.0};
    const SynthesisResult out =
        synthesize(plan, layout, ref, unit_dut(), adc, ApcOptions{});

    const auto env_x = envelope(out.record.x, adc.sample_rate, plan, 2e-4, 1e5);
    const auto env_y = envelope(out.record.y, adc.sample_rate, plan, 2e-4, 1e5);
    std::vector<double> total(env_x.size());
    for (std::size_t i = 0; i < env_x.size(); ++i)
        total[i] = std::sqrt(env_x[i].rms * env_x[i].rms + env_y[i].rms * env_y[i].rms);
    const double peak = *std::max_element(total.begin(), total.end());
    const double dip = *std::min_element(total.begin(), total.end());
    CHECK(20.0 * std::log10(peak / dip) >= 10.0);
}

TEST_CASE("closed-loop tracking flattens the envelope of the same scenario") {
    const SweepPlan plan = small_sweep();
    const InterferometerLayout layout = single_channel_layout();
    const BirefringentFiberSpec ref{24, 16e-12, 0.0, 6};
    const AdcSpec adc{10e6, 24, 0.0};
    ApcOptions apc;
    apc.enabled = true;
    apc.config.loop_rate = 1e5;
    apc.config.dither_step = 0.01;
    apc.config.gain = 0.5;
    const BirefringentFiber fiber(ref);
    apc.initial_state = solve_alignment(
        TransformerState::standard(),
        (fiber.jones(plan.nu_instant(0.0)) * layout.reference_launch).normalized(),
        apc.config.target);
    const SynthesisResult out =
        synthesize(plan, layout, ref, unit_dut(), adc, apc);

    const auto env_x = envelope(out.record.x, adc.sample_rate, plan, 2e-4, 1e5);
    const auto env_y = envelope(out.record.y, adc.sample_rate, plan, 2e-4, 1e5);
    std::vector<double> total(env_x.size());
    for (std::size_t i = 0; i < env_x.size(); ++i)
        total[i] = std::sqrt(env_x[i].rms * env_x[i].rms + env_y[i].rms * env_y[i].rms);
    const double peak = *std::max_element(total.begin(), total.end());
    const double dip = *std::min_element(total.begin(), total.end());
    CHECK(20.0 * std::log10(peak / dip) < 1.0);
}

TEST_CASE("single-channel spectrum peaks at the fringe frequency") {
    const SweepPlan plan = small_sweep();
    const InterferometerLayout layout = single_channel_layout();
    const BirefringentFiberSpec ref{1, 0.0, 0.0, 2};
    const AdcSpec adc{10e6, 24, 0.0};
    const SynthesisResult out =
        synthesize(plan, layout, ref, unit_dut(), adc, ApcOptions{});

    // Short segment so the sweep-rate drift stays below the bin width.
    const std::size_t len = 4096;
    const std::size_t begin = out.record.size() / 2;
    const double t_mid = (begin + len / 2.0) / adc.sample_rate;
    const double gamma = sweep_rate_hz(plan, plan.lambda_at(t_mid));
    // The DUT applies a seeded SOP rotation, so the stronger of the two
    // input-polarization channels on the X detector sets the peak.
    const MultiCoreFiber dut(unit_dut());
    const Eigen::Matrix2cd blk = dut.core_block(0, 0, plan.nu_instant(t_mid));
    const JonesVector launches[2] = {layout.launch_a, layout.launch_b};
    int strongest = 0;
    double best_amp = -1.0;
    for (int p = 0; p < 2; ++p) {
        const JonesVector l = launches[p].normalized();
        const JonesVector mapped{blk(0, 0) * l.ex + blk(0, 1) * l.ey,
                                 blk(1, 0) * l.ex + blk(1, 1) * l.ey};
        const double a = std::abs(overlap(layout.recv_x, mapped));
        if (a > best_amp) {
            best_amp = a;
            strongest = p;
        }
    }
    const double delay = layout.delay_plan.channel_delay(strongest, 0, 0, 0);
    const double expected = fringe_frequency(gamma, delay);
    const double bin = adc.sample_rate / static_cast<double>(len);
    const double peak = segment_peak_frequency(out.record.x, adc.sample_rate, begin, len);
    CHECK(std::abs(peak - expected) <= bin);
}

TEST_CASE("beat amplitude follows the half-angle fading law") {
    // Rotate the reference SOP by a known Poincare angle via a fixed
    // transformer and compare the envelope against cos(theta/2).
    const SweepPlan plan = small_sweep();
    InterferometerLayout layout = single_channel_layout();
    // Expect the launch polarization itself so theta = 0 means aligned.
    layout.expected_state = layout.reference_launch;
    const BirefringentFiberSpec ref{1, 0.0, 0.0, 2};
    const AdcSpec adc{10e6, 24, 0.0};

    auto mean_envelope = [&](double theta) {
        ApcOptions apc;  // disabled; initial state applies a fixed rotation
        apc.initial_state = TransformerState::standard();
        // Stage 1 sits at 45 degrees, whose Poincare axis is orthogonal to
        // the launch state, so the fade angle equals the retardance.
        apc.initial_state.stages[1].retardance = theta;
        SynthesisResult out = synthesize(plan, layout, ref, unit_dut(), adc, apc);
        const auto env_x = envelope(out.record.x, adc.sample_rate, plan, 2e-4, 1e5);
        const auto env_y = envelope(out.record.y, adc.sample_rate, plan, 2e-4, 1e5);
        double acc = 0.0;
        for (std::size_t i = 0; i < env_x.size(); ++i)
            acc += std::sqrt(env_x[i].rms * env_x[i].rms + env_y[i].rms * env_y[i].rms);
        return acc / static_cast<double>(env_x.size());
    };

    const double base = mean_envelope(0.0);
    for (double theta : {0.4, 0.9, 1.6}) {
        const double measured = mean_envelope(theta) / base;
        CHECK(measured == doctest::Approx(std::cos(theta / 2.0)).epsilon(0.02));
    }
}

TEST_CASE("tracking tap power equals the squared overlap with the expected state") {
    const SweepPlan plan = small_sweep();
    const InterferometerLayout layout = single_channel_layout();
    const BirefringentFiberSpec ref{24, 4e-12, 0.0, 8};
    const AdcSpec adc{10e6, 24, 0.0};
    const SynthesisResult out =
        synthesize(plan, layout, ref, unit_dut(), adc, ApcOptions{});

    const BirefringentFiber fiber(ref);
    const JonesVector expected = layout.expected_state.normalized();
    for (std::size_t n = 0; n < out.record.size(); n += 5000) {
        const double t = static_cast<double>(n) / adc.sample_rate;
        const JonesVector r =
            (fiber.jones(plan.nu_instant(t)) * layout.reference_launch).normalized();
        const double want = layout.tap_fraction * std::norm(overlap(expected, r));
        CHECK(static_cast<double>(out.record.trk[n]) ==
              doctest::Approx(want).epsilon(2e-3));
    }
}

TEST_CASE("synthesis is deterministic for identical configs and seeds") {
    const SweepPlan plan = small_sweep();
    const InterferometerLayout layout = single_channel_layout();
    const BirefringentFiberSpec ref{24, 4e-12, 0.0, 8};
    const AdcSpec adc{10e6, 14, 1e-4};
    const SynthesisResult a = synthesize(plan, layout, ref, unit_dut(), adc, ApcOptions{}, 99);
    const SynthesisResult b = synthesize(plan, layout, ref, unit_dut(), adc, ApcOptions{}, 99);
    CHECK(a.record.x == b.record.x);
    CHECK(a.record.y == b.record.y);
    CHECK(a.record.aux == b.record.aux);
    CHECK(a.record.trk == b.record.trk);
    const SynthesisResult c = synthesize(plan, layout, ref, unit_dut(), adc, ApcOptions{}, 100);
    CHECK(a.record.x != c.record.x);
}

TEST_CASE("sample-rate feasibility is enforced") {
    const SweepPlan plan = small_sweep();
    InterferometerLayout layout = single_channel_layout();
    const BirefringentFiberSpec ref{1, 0.0, 0.0, 2};
    // Max fringe ~ gamma * delay ~ 1.9 MHz; 2 MS/s violates the margin.
    const AdcSpec adc{2e6, 16, 0.0};
    CHECK_THROWS_AS(
        (void)synthesize(plan, layout, ref, unit_dut(), adc, ApcOptions{}),
        ConfigError);
}

TEST_CASE("aux delay colliding with a channel delay is rejected") {
    const SweepPlan plan = small_sweep();
    InterferometerLayout layout = single_channel_layout();
    layout.aux_delay = layout.delay_plan.channel_delay(0, 0, 0, 0);
    const BirefringentFiberSpec ref{1, 0.0, 0.0, 2};
    const AdcSpec adc{10e6, 16, 0.0};
    CHECK_THROWS_AS(
        (void)synthesize(plan, layout, ref, unit_dut(), adc, ApcOptions{}),
        ConfigError);
}

TEST_CASE("envelope extraction: sine, AM sine, zero signal") {
    const double fs = 1e6;
    const double f0 = 5e4;
    SweepPlan plan = small_sweep();
    std::vector<float> sine(20000), am(20000), zero(20000, 0.0f);
    for (std::size_t n = 0; n < sine.size(); ++n) {
        const double t = static_cast<double>(n) / fs;
        sine[n] = static_cast<float>(0.8 * std::sin(2.0 * kPi * f0 * t));
        am[n] = static_cast<float>((0.6 + 0.3 * std::sin(2.0 * kPi * 100.0 * t)) *
                                   std::sin(2.0 * kPi * f0 * t));
    }
    const auto env = envelope(sine, fs, plan, 5e-4, f0);
    for (const auto& p : env)
        CHECK(p.rms == doctest::Approx(0.8 / std::sqrt(2.0)).epsilon(0.01));

    const auto env_am = envelope(am, fs, plan, 5e-4, f0);
    double lo = 1e9, hi = 0.0;
    for (const auto& p : env_am) {
        lo = std::min(lo, p.rms);
        hi = std::max(hi, p.rms);
    }
    CHECK(hi == doctest::Approx(0.9 / std::sqrt(2.0)).epsilon(0.02));
    CHECK(lo == doctest::Approx(0.3 / std::sqrt(2.0)).epsilon(0.02));

    const auto env_zero = envelope(zero, fs, plan, 5e-4, f0);
    for (const auto& p : env_zero) CHECK(p.rms == 0.0);

    CHECK_THROWS_AS((void)envelope(sine, fs, plan, 5e-5, 1e3), InvalidInputError);
}
