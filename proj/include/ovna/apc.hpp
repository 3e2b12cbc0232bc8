#pragma once

#include <utility>
#include <vector>

#include "ovna/fiber.hpp"
#include "ovna/jones.hpp"
#include "ovna/sweep.hpp"

namespace ovna {

/// One variable retarder stage. The orientation is a fixed actuator axis;
/// the feedback loop drives the retardance only.
struct TransformerStage {
    double retardance{0.0};   // radians
    double orientation{0.0};  // radians
};

/// Cascade of variable retarders with a bounded per-parameter slew rate.
/// Retardances wrap at +-pi; a wrapped stage produces the same matrix up to
/// global phase, so tracking never runs out of actuator range.
struct TransformerState {
    std::vector<TransformerStage> stages;
    double max_slew{2e4};  // radians/second per parameter

    /// Stages at alternating 0 / pi/4 orientations; n_stages >= 3 spans all
    /// unitary polarization transforms up to global phase.
    static TransformerState standard(int n_stages = 4);

    JonesMatrix matrix() const;
    int n_params() const { return static_cast<int>(stages.size()); }
    void validate() const;
};

/// Rule-of-thumb rotation rate of the reference polarization during a sweep:
/// 2 pi * gamma * dgd, radians/second.
double compute_rotation_rate(double gamma, double dgd);

JonesVector apply_transformer(const TransformerState& state, const JonesVector& input);

struct ControllerConfig {
    double loop_rate{2e4};     // Hz
    double dither_step{0.02};  // radians
    double gain{0.5};
    JonesVector target{cdouble(1.0 / 1.41421356237309515, 0.0),
                       cdouble(1.0 / 1.41421356237309515, 0.0)};

    void validate() const;
};

/// Orthogonal-power observations at parameter +- dither_step.
struct DitherObservation {
    double plus{0.0};
    double minus{0.0};
};

/// One coordinate-dither update: move the selected retardance along the
/// negative finite-difference gradient, clamped to max_slew / loop_rate.
TransformerState controller_step(const TransformerState& state, const ControllerConfig& config,
                                 int param_index, double base_power,
                                 const DitherObservation& obs);

/// Closed-loop driver: cycles through the retardance parameters, probing the
/// supplied orthogonal-power observable at +- dither_step each iteration.
class DitherController {
public:
    DitherController(TransformerState state, ControllerConfig config)
        : state_(std::move(state)), config_(std::move(config)) {
        state_.validate();
        config_.validate();
    }

    template <typename F>
    void iterate(F&& orthogonal_power) {
        const int idx = next_param_;
        next_param_ = (next_param_ + 1) % state_.n_params();
        const double p0 = orthogonal_power(std::as_const(state_));
        TransformerState plus = state_;
        TransformerState minus = state_;
        plus.stages[static_cast<std::size_t>(idx)].retardance += config_.dither_step;
        minus.stages[static_cast<std::size_t>(idx)].retardance -= config_.dither_step;
        const DitherObservation obs{orthogonal_power(std::as_const(plus)),
                                    orthogonal_power(std::as_const(minus))};
        state_ = controller_step(state_, config_, idx, p0, obs);
    }

    const TransformerState& state() const { return state_; }
    TransformerState& state() { return state_; }
    const ControllerConfig& config() const { return config_; }

private:
    TransformerState state_;
    ControllerConfig config_;
    int next_param_{0};
};

/// Fraction of a unit-power state in the orthogonal polarization after the
/// transformer: |<target_perp, M r>|^2 / |r|^2.
double orthogonal_power_fraction(const TransformerState& state, const JonesVector& input,
                                 const JonesVector& target);

struct TrackingTrace {
    std::vector<double> time;              // seconds
    std::vector<double> lambda;            // meters
    std::vector<double> tracking_power;    // [0, 1]
    std::vector<double> orthogonal_power;  // [0, 1]
};

/// Runs the feedback loop (or the open-loop overlap when disabled) against
/// the reference fiber across the sweep; the state is updated in place.
TrackingTrace run_tracking(const SweepPlan& plan, const BirefringentFiber& fiber,
                           const JonesVector& launch, TransformerState& state,
                           const ControllerConfig& config, bool apc_enabled);

/// Mean rotation rate of the output polarization across [nu_lo, nu_hi],
/// converted to radians/second at sweep rate gamma. Estimated from the mean
/// arc speed of the Stokes trace, deconvolved with the analytic ensemble
/// means of the cone-angle sine and the Maxwellian local-to-RMS DGD ratio.
double measure_sop_rotation_rate(const BirefringentFiber& fiber, const JonesVector& launch,
                                 double nu_lo, double nu_hi, double gamma,
                                 int n_samples = 4000);

/// Deterministic offline solve: retardances mapping `input` to `target`
/// (pattern search with multi-start). Used for single-wavelength alignment.
TransformerState solve_alignment(const TransformerState& init, const JonesVector& input,
                                 const JonesVector& target);

}  // namespace ovna
