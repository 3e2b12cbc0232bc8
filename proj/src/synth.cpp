#include "ovna/synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

namespace ovna {

void InterferometerLayout::validate() const {
    if (!(tap_fraction > 0.0) || tap_fraction >= 1.0)
        throw ConfigError("InterferometerLayout: tap_fraction must lie in (0, 1)");
    if (!(aux_delay > 0.0)) throw ConfigError("InterferometerLayout: aux_delay must be > 0");
    if (delay_plan.input_port_delays.empty())
        throw ConfigError("InterferometerLayout: empty delay plan");
    for (double d : delay_plan.all_delays()) {
        if (!(d > 0.0)) throw ConfigError("InterferometerLayout: channel delays must be > 0");
        if (std::abs(d - aux_delay) < delay_plan.guard)
            throw ConfigError("InterferometerLayout: aux_delay collides with a channel delay");
    }
    if (recv_x.power() <= 0.0 || recv_y.power() <= 0.0 || expected_state.power() <= 0.0 ||
        launch_a.power() <= 0.0 || launch_b.power() <= 0.0 || reference_launch.power() <= 0.0)
        throw ConfigError("InterferometerLayout: zero-power polarization state");
}

namespace {

struct ChannelSynth {
    ChannelKey key;
    double delay;                  // seconds, relative to reference
    std::vector<cdouble> amp;      // response amplitude on the coarse grid
    double phase;                  // running beat phase accumulator
};

double wrap_phase(double x) { return std::remainder(x, 2.0 * kPi); }

}  // namespace

double max_fringe_frequency(const SweepPlan& plan, const InterferometerLayout& layout,
                            const MultiCoreFiber& dut) {
    const double gamma_max = sweep_rate_hz(plan, plan.lambda_start);
    double tau_max = layout.aux_delay;
    for (const ChannelKey& key : enumerate_channels(layout.delay_plan)) {
        const double tau = layout.delay_plan.channel_delay(key.in_pol, key.in_port,
                                                           key.out_port, key.out_pol) +
                           dut.path_group_delay(key.out_port, key.in_port);
        tau_max = std::max(tau_max, tau);
    }
    double f = gamma_max * tau_max;
    if (plan.nonlinearity.amplitude_hz != 0.0)
        f += tau_max * plan.nonlinearity.amplitude_hz * 2.0 * kPi / plan.nonlinearity.period_s;
    return f;
}

SynthesisResult synthesize(const SweepPlan& plan, const InterferometerLayout& layout,
                           const BirefringentFiber& ref_fiber, const MultiCoreFiber& dut,
                           const AdcSpec& adc, const ApcOptions& apc,
                           std::uint64_t noise_seed) {
    plan.validate();
    adc.validate();
    layout.validate();
    if (apc.enabled) {
        apc.config.validate();
        apc.initial_state.validate();
        if (apc.config.loop_rate > adc.sample_rate)
            throw ConfigError("synthesize: loop_rate exceeds the synthesis block granularity");
    }
    const double f_max = max_fringe_frequency(plan, layout, dut);
    if (adc.sample_rate < 2.2 * f_max)
        throw ConfigError("synthesize: sample rate below 2.2x the maximum fringe frequency");

    const double duration = plan.duration();
    const double fs = adc.sample_rate;
    const std::size_t n_samples = static_cast<std::size_t>(std::floor(duration * fs)) + 1;
    const int n_ports = layout.delay_plan.n_ports();

    // Device response per channel, sampled on a coarse frequency grid and
    // linearly interpolated inside the sample loop.
    const double nu_a = plan.nu_instant(0.0);
    const double nu_b = plan.nu_instant(duration);
    const double nu_lo = std::min(nu_a, nu_b) - std::abs(plan.nonlinearity.amplitude_hz) - 1e6;
    const double nu_hi = std::max(nu_a, nu_b) + std::abs(plan.nonlinearity.amplitude_hz) + 1e6;
    const std::size_t n_coarse = 513;
    const double coarse_step = (nu_hi - nu_lo) / static_cast<double>(n_coarse - 1);

    const JonesVector recv[2] = {layout.recv_x.normalized(), layout.recv_y.normalized()};
    const JonesVector launch[2] = {layout.launch_a.normalized(), layout.launch_b.normalized()};
    const double port_split = 1.0 / static_cast<double>(n_ports);
    const double pol_split = 0.5;  // launch multiplex and reference tap

    std::vector<ChannelSynth> channels;
    for (const ChannelKey& key : enumerate_channels(layout.delay_plan)) {
        ChannelSynth ch;
        ch.key = key;
        ch.delay = layout.delay_plan.channel_delay(key.in_pol, key.in_port, key.out_port,
                                                   key.out_pol) +
                   dut.path_group_delay(key.out_port, key.in_port);
        ch.amp.resize(n_coarse);
        for (std::size_t m = 0; m < n_coarse; ++m) {
            const double nu = nu_lo + coarse_step * static_cast<double>(m);
            const Eigen::Matrix2cd blk = dut.core_block(key.out_port, key.in_port, nu);
            const JonesVector in = launch[key.in_pol];
            const JonesVector out{blk(0, 0) * in.ex + blk(0, 1) * in.ey,
                                  blk(1, 0) * in.ex + blk(1, 1) * in.ey};
            ch.amp[m] = overlap(recv[key.out_pol], out) * port_split * pol_split;
        }
        ch.phase = wrap_phase(2.0 * kPi * ch.delay * plan.nu_instant(0.0));
        channels.push_back(std::move(ch));
    }

    double amp_bound[2] = {1e-12, 1e-12};
    for (std::size_t m = 0; m < n_coarse; ++m) {
        double s[2] = {0.0, 0.0};
        for (const auto& ch : channels) s[ch.key.out_pol] += std::abs(ch.amp[m]);
        amp_bound[0] = std::max(amp_bound[0], s[0]);
        amp_bound[1] = std::max(amp_bound[1], s[1]);
    }

    const double aux_amp = 0.5;
    WaveformRecord rec;
    rec.sample_rate = fs;
    rec.sweep = plan;
    rec.aux_delay = layout.aux_delay;
    rec.full_scale = {1.3 * amp_bound[0], 1.3 * amp_bound[1], 1.3 * aux_amp,
                      1.3 * layout.tap_fraction};
    std::vector<double> buf[4];
    for (auto& b : buf) b.assign(n_samples, 0.0);

    // Feedback loop timing: the transformer is updated once per block.
    const double block_rate = apc.enabled ? apc.config.loop_rate : 1000.0;
    const JonesVector target =
        apc.enabled ? apc.config.target.normalized() : layout.expected_state.normalized();
    const JonesVector expected = layout.expected_state.normalized();
    DitherController ctrl(apc.enabled ? apc.initial_state : TransformerState::standard(),
                          apc.enabled ? apc.config : ControllerConfig{});
    if (!apc.enabled) ctrl.state() = apc.initial_state;

    TrackingTrace trace;
    auto ref_state = [&](double t) {
        return (ref_fiber.jones(plan.nu_instant(t)) * layout.reference_launch).normalized();
    };

    double aux_phase = wrap_phase(2.0 * kPi * layout.aux_delay * plan.nu_instant(0.0));
    double nu_prev = plan.nu_instant(0.0);
    std::size_t n_done = 0;
    std::size_t block = 0;
    cdouble prev_block_end(0.0, 0.0);
    double ref_sign = 1.0;
    while (n_done < n_samples) {
        const double t_block = static_cast<double>(block) / block_rate;
        const double t_next = static_cast<double>(block + 1) / block_rate;
        const JonesVector r0 = ref_state(t_block);
        if (apc.enabled) {
            ctrl.iterate([&](const TransformerState& s) {
                return orthogonal_power_fraction(s, r0, target);
            });
        }
        const JonesMatrix a_mat = ctrl.state().matrix();
        cdouble c0 = overlap(expected, a_mat * r0);
        cdouble c1 = overlap(expected, a_mat * ref_state(std::min(t_next, duration)));
        // A retardance wrap at +-pi flips the transformer's global sign; the
        // physical field is phase-continuous, so carry the sign across blocks.
        if (std::abs(prev_block_end) > 1e-6 &&
            (std::conj(prev_block_end) * (ref_sign * c0)).real() < 0.0)
            ref_sign = -ref_sign;
        c0 *= ref_sign;
        c1 *= ref_sign;
        prev_block_end = c1;
        trace.time.push_back(t_block);
        trace.lambda.push_back(plan.lambda_at(t_block));
        trace.tracking_power.push_back(std::norm(c0));
        trace.orthogonal_power.push_back(1.0 - std::norm(c0));

        const std::size_t n_end =
            std::min(n_samples, static_cast<std::size_t>(std::ceil(t_next * fs)));
        for (std::size_t n = n_done; n < n_end; ++n) {
            const double t = static_cast<double>(n) / fs;
            const double nu = plan.nu_instant(t);
            const double dnu = nu - nu_prev;
            nu_prev = nu;
            const double env = plan.envelope_at(plan.lambda_at(t));
            const double frac = (t - t_block) * block_rate;
            const cdouble w = std::conj(c0 + (c1 - c0) * frac);
            // Coarse-grid interpolation of the device response.
            const double pos = (nu - nu_lo) / coarse_step;
            const std::size_t i0 = std::min(
                n_coarse - 2, static_cast<std::size_t>(std::max(0.0, std::floor(pos))));
            const double fracg = std::clamp(pos - static_cast<double>(i0), 0.0, 1.0);
            for (auto& ch : channels) {
                if (n > 0) ch.phase = wrap_phase(ch.phase + 2.0 * kPi * ch.delay * dnu);
                const cdouble a = ch.amp[i0] + (ch.amp[i0 + 1] - ch.amp[i0]) * fracg;
                buf[ch.key.out_pol][n] +=
                    env * (a * w * std::polar(1.0, ch.phase)).real();
            }
            if (n > 0) aux_phase = wrap_phase(aux_phase + 2.0 * kPi * layout.aux_delay * dnu);
            buf[2][n] = env * aux_amp * std::cos(aux_phase);
            buf[3][n] = env * layout.tap_fraction * std::norm(w);
        }
        n_done = n_end;
        ++block;
    }
    trace.time.push_back(duration);
    {
        const JonesVector r_end = ref_state(duration);
        const cdouble c_end = overlap(expected, ctrl.state().matrix() * r_end);
        trace.lambda.push_back(plan.lambda_at(duration));
        trace.tracking_power.push_back(std::norm(c_end));
        trace.orthogonal_power.push_back(1.0 - std::norm(c_end));
    }

    // Additive noise, then quantization to the ADC's code grid.
    std::mt19937_64 rng(noise_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<float>* out[4] = {&rec.x, &rec.y, &rec.aux, &rec.trk};
    for (int c = 0; c < 4; ++c) {
        const double full = rec.full_scale[static_cast<std::size_t>(c)];
        const double lsb = 2.0 * full / std::ldexp(1.0, adc.bits);
        out[c]->resize(n_samples);
        for (std::size_t n = 0; n < n_samples; ++n) {
            double v = buf[c][n];
            if (adc.noise_rms > 0.0) v += adc.noise_rms * full * gauss(rng);
            v = std::clamp(v, -full, full);
            v = std::round(v / lsb) * lsb;
            if (!std::isfinite(v)) throw InternalError("synthesize: non-finite sample");
            (*out[c])[n] = static_cast<float>(v);
        }
    }

    return SynthesisResult{std::move(rec), std::move(trace), ctrl.state()};
}

SynthesisResult synthesize(const SweepPlan& plan, const InterferometerLayout& layout,
                           const BirefringentFiberSpec& ref_spec, const McfSpec& dut_spec,
                           const AdcSpec& adc, const ApcOptions& apc,
                           std::uint64_t noise_seed) {
    return synthesize(plan, layout, BirefringentFiber(ref_spec), MultiCoreFiber(dut_spec), adc,
                      apc, noise_seed);
}

std::vector<EnvelopePoint> envelope(const std::vector<float>& channel, double sample_rate,
                                    const SweepPlan& sweep, double window,
                                    double min_fringe_hz) {
    if (!(min_fringe_hz > 0.0) || window * min_fringe_hz < 10.0)
        throw InvalidInputError("envelope: window must cover >= 10 fringe periods");
    const std::size_t win = static_cast<std::size_t>(std::floor(window * sample_rate));
    if (win < 2 || channel.size() < win)
        throw InvalidInputError("envelope: window too short for the record");
    std::vector<EnvelopePoint> env;
    for (std::size_t start = 0; start + win <= channel.size(); start += win) {
        double acc = 0.0;
        for (std::size_t n = start; n < start + win; ++n)
            acc += static_cast<double>(channel[n]) * static_cast<double>(channel[n]);
        const double t = (static_cast<double>(start) + 0.5 * static_cast<double>(win)) /
                         sample_rate;
        env.push_back(EnvelopePoint{t, sweep.lambda_at(t), std::sqrt(acc / win)});
    }
    return env;
}

}  // namespace ovna
