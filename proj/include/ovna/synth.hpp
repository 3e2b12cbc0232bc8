#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ovna/apc.hpp"
#include "ovna/fiber.hpp"
#include "ovna/sweep.hpp"

namespace ovna {

/// Geometry of the interferometer around the device under test.
struct InterferometerLayout {
    DelayPlan delay_plan;
    double aux_delay{0.0};      // seconds, auxiliary interferometer
    double tap_fraction{0.01};  // fraction of reference power tapped for tracking
    JonesVector recv_x{cdouble(1.0, 0.0), cdouble(0.0, 0.0)};
    JonesVector recv_y{cdouble(0.0, 0.0), cdouble(1.0, 0.0)};
    /// Reference polarization expected by the receiver; the tracking tap is
    /// polarized along this state.
    JonesVector expected_state{cdouble(0.70710678118654752, 0.0),
                               cdouble(0.70710678118654752, 0.0)};
    JonesVector launch_a{cdouble(1.0, 0.0), cdouble(0.0, 0.0)};
    JonesVector launch_b{cdouble(0.0, 0.0), cdouble(1.0, 0.0)};
    JonesVector reference_launch{cdouble(1.0, 0.0), cdouble(0.0, 0.0)};

    void validate() const;
};

/// Digitized receiver outputs of one sweep.
struct WaveformRecord {
    std::vector<float> x, y, aux, trk;
    double sample_rate{0.0};
    SweepPlan sweep;
    double aux_delay{0.0};
    std::array<double, 4> full_scale{1.0, 1.0, 1.0, 1.0};  // X, Y, AUX, TRK

    std::size_t size() const { return x.size(); }
};

struct ApcOptions {
    bool enabled{false};
    ControllerConfig config;
    TransformerState initial_state = TransformerState::standard();
};

struct SynthesisResult {
    WaveformRecord record;
    TrackingTrace trace;
    TransformerState final_state;
};

/// Full receiver-waveform synthesis: per-channel beats at the delays of the
/// plan, weighted by the device response projected on the receiver basis and
/// by the reference polarization overlap, plus the auxiliary interferometer
/// beat and the polarized tracking tap. The feedback loop advances in blocks
/// of one loop period; within a block the transformer is frozen.
SynthesisResult synthesize(const SweepPlan& plan, const InterferometerLayout& layout,
                           const BirefringentFiber& ref_fiber, const MultiCoreFiber& dut,
                           const AdcSpec& adc, const ApcOptions& apc,
                           std::uint64_t noise_seed = 1);

SynthesisResult synthesize(const SweepPlan& plan, const InterferometerLayout& layout,
                           const BirefringentFiberSpec& ref_spec, const McfSpec& dut_spec,
                           const AdcSpec& adc, const ApcOptions& apc,
                           std::uint64_t noise_seed = 1);

/// Largest beat frequency of the configured layout, Hz (used for the ADC
/// bandwidth feasibility check).
double max_fringe_frequency(const SweepPlan& plan, const InterferometerLayout& layout,
                            const MultiCoreFiber& dut);

struct EnvelopePoint {
    double time{0.0};    // seconds, window center
    double lambda{0.0};  // meters, from sweep metadata
    double rms{0.0};
};

/// RMS envelope over consecutive windows of `window` seconds. The window
/// must cover at least 10 periods of the slowest expected fringe.
std::vector<EnvelopePoint> envelope(const std::vector<float>& channel, double sample_rate,
                                    const SweepPlan& sweep, double window,
                                    double min_fringe_hz);

}  // namespace ovna
