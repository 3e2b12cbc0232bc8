#include "ovna/apc.hpp"

#include <algorithm>
#include <cmath>

namespace ovna {

TransformerState TransformerState::standard(int n_stages) {
    TransformerState s;
    s.stages.resize(static_cast<std::size_t>(n_stages));
    for (int k = 0; k < n_stages; ++k)
        s.stages[static_cast<std::size_t>(k)].orientation = (k % 2) ? kPi / 4.0 : 0.0;
    return s;
}

JonesMatrix TransformerState::matrix() const {
    JonesMatrix m = JonesMatrix::identity();
    for (const auto& st : stages) m = waveplate(st.retardance, st.orientation) * m;
    return m;
}

void TransformerState::validate() const {
    if (stages.size() < 3)
        throw ConfigError("TransformerState: at least 3 stages required");
    for (const auto& st : stages)
        if (!std::isfinite(st.retardance) || !std::isfinite(st.orientation))
            throw ConfigError("TransformerState: non-finite stage parameter");
    if (!(max_slew > 0.0)) throw ConfigError("TransformerState: max_slew must be > 0");
}

double compute_rotation_rate(double gamma, double dgd) {
    return 2.0 * kPi * gamma * dgd;
}

JonesVector apply_transformer(const TransformerState& state, const JonesVector& input) {
    return state.matrix() * input;
}

void ControllerConfig::validate() const {
    if (!(loop_rate > 0.0)) throw ConfigError("ControllerConfig: loop_rate must be > 0");
    if (!(dither_step > 0.0) || dither_step >= 0.5)
        throw ConfigError("ControllerConfig: dither_step must lie in (0, 0.5)");
    if (!(gain > 0.0)) throw ConfigError("ControllerConfig: gain must be > 0");
    if (target.power() <= 0.0)
        throw ConfigError("ControllerConfig: target state must have nonzero power");
}

namespace {

double wrap_pi(double x) {
    double w = std::remainder(x, 2.0 * kPi);
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

}  // namespace

TransformerState controller_step(const TransformerState& state, const ControllerConfig& config,
                                 int param_index, double /*base_power*/,
                                 const DitherObservation& obs) {
    const double grad = (obs.plus - obs.minus) / (2.0 * config.dither_step);
    double delta = -config.gain * grad;
    const double limit = state.max_slew / config.loop_rate;
    delta = std::clamp(delta, -limit, limit);
    TransformerState next = state;
    auto& ret = next.stages[static_cast<std::size_t>(param_index)].retardance;
    ret = wrap_pi(ret + delta);
    return next;
}

double orthogonal_power_fraction(const TransformerState& state, const JonesVector& input,
                                 const JonesVector& target) {
    const JonesVector out = apply_transformer(state, input);
    const double p = out.power();
    if (p <= 0.0) throw InvalidInputError("orthogonal_power_fraction: zero-power input");
    const JonesVector perp = orthogonal_state(target);
    return std::norm(overlap(perp, out)) / (p * target.power());
}

TrackingTrace run_tracking(const SweepPlan& plan, const BirefringentFiber& fiber,
                           const JonesVector& launch, TransformerState& state,
                           const ControllerConfig& config, bool apc_enabled) {
    plan.validate();
    config.validate();
    state.validate();
    const double duration = plan.duration();
    const std::size_t n_blocks =
        static_cast<std::size_t>(std::floor(duration * config.loop_rate)) + 1;
    const JonesVector target = config.target.normalized();
    DitherController ctrl(state, config);
    TrackingTrace trace;
    trace.time.reserve(n_blocks);
    trace.lambda.reserve(n_blocks);
    trace.tracking_power.reserve(n_blocks);
    trace.orthogonal_power.reserve(n_blocks);
    for (std::size_t k = 0; k < n_blocks; ++k) {
        const double t = static_cast<double>(k) / config.loop_rate;
        const JonesVector r = (fiber.jones(plan.nu_instant(t)) * launch).normalized();
        if (apc_enabled) {
            ctrl.iterate([&](const TransformerState& s) {
                return orthogonal_power_fraction(s, r, target);
            });
        }
        const JonesVector out = apply_transformer(ctrl.state(), r);
        const double trk = std::norm(overlap(target, out));
        const double orth = std::norm(overlap(orthogonal_state(target), out));
        trace.time.push_back(t);
        trace.lambda.push_back(plan.lambda_at(t));
        trace.tracking_power.push_back(trk);
        trace.orthogonal_power.push_back(orth);
    }
    state = ctrl.state();
    return trace;
}

double measure_sop_rotation_rate(const BirefringentFiber& fiber, const JonesVector& launch,
                                 double nu_lo, double nu_hi, double gamma, int n_samples) {
    if (n_samples < 3) throw InvalidInputError("measure_sop_rotation_rate: need >= 3 samples");
    if (!(nu_hi > nu_lo)) throw InvalidInputError("measure_sop_rotation_rate: empty band");
    const double dnu = (nu_hi - nu_lo) / (n_samples - 1.0);
    // Arc length of the output polarization trace on the sphere. The local
    // arc speed is (rotation rate) * sin(cone angle) * (local DGD / RMS DGD);
    // for an isotropic random fiber the cone angle is uniform on the sphere
    // (mean sine pi/4) and the local DGD is Maxwellian (mean 0.92132 of the
    // RMS), so dividing by the product of the two means deconvolves the arc
    // speed into the full rotation rate.
    double arc = 0.0;
    StokesVector prev = jones_to_stokes((fiber.jones(nu_lo) * launch).normalized());
    for (int k = 1; k < n_samples; ++k) {
        const StokesVector cur =
            jones_to_stokes((fiber.jones(nu_lo + k * dnu) * launch).normalized());
        const double dx = cur.s1 - prev.s1;
        const double dy = cur.s2 - prev.s2;
        const double dz = cur.s3 - prev.s3;
        arc += std::sqrt(dx * dx + dy * dy + dz * dz);
        prev = cur;
    }
    constexpr double kMeanSinCone = kPi / 4.0;
    constexpr double kMaxwellMeanOverRms = 0.92131773192356127;  // sqrt(8 / (3 pi))
    return arc / (nu_hi - nu_lo) * gamma / (kMeanSinCone * kMaxwellMeanOverRms);
}

TransformerState solve_alignment(const TransformerState& init, const JonesVector& input,
                                 const JonesVector& target) {
    const JonesVector in = input.normalized();
    const JonesVector tgt = target.normalized();
    const JonesVector perp = orthogonal_state(tgt);
    auto objective = [&](const TransformerState& s) {
        return std::norm(overlap(perp, apply_transformer(s, in)));
    };
    const std::size_t n = init.stages.size();
    std::vector<std::vector<double>> starts = {
        std::vector<double>(n, 0.0), std::vector<double>(n, kPi / 2.0),
        std::vector<double>(n, -kPi / 2.0)};
    {
        std::vector<double> alt(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) alt[k] = (k % 2) ? kPi / 2.0 : -kPi / 2.0;
        starts.push_back(alt);
        std::vector<double> ramp(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) ramp[k] = 0.7 * static_cast<double>(k + 1);
        starts.push_back(ramp);
    }
    TransformerState best = init;
    double best_val = objective(best);
    for (const auto& start : starts) {
        TransformerState s = init;
        for (std::size_t k = 0; k < n; ++k) s.stages[k].retardance = start[k];
        double val = objective(s);
        double step = 0.6;
        while (step > 1e-10) {
            bool improved = false;
            for (std::size_t k = 0; k < n; ++k) {
                for (double sign : {1.0, -1.0}) {
                    TransformerState trial = s;
                    trial.stages[k].retardance += sign * step;
                    const double v = objective(trial);
                    if (v < val) {
                        s = trial;
                        val = v;
                        improved = true;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        if (val < best_val) {
            best_val = val;
            best = s;
        }
    }
    return best;
}

}  // namespace ovna
