#pragma once

#include <vector>

#include "ovna/errors.hpp"
#include "ovna/jones.hpp"

namespace ovna {

/// Sinusoidal perturbation of the instantaneous optical frequency.
struct SweepNonlinearity {
    double amplitude_hz{0.0};
    double period_s{1e-3};
};

struct PowerEnvelopePoint {
    double lambda{0.0};    // meters
    double relative{1.0};  // (0, 1]
};

/// Laser sweep description: linear wavelength ramp plus tuning nonlinearity
/// and a relative power envelope.
struct SweepPlan {
    double lambda_start{0.0};  // meters
    double lambda_stop{0.0};   // meters
    double sweep_rate{0.0};    // meters/second
    SweepNonlinearity nonlinearity;
    std::vector<PowerEnvelopePoint> power_envelope;  // empty = flat

    double duration() const { return (lambda_stop - lambda_start) / sweep_rate; }
    double lambda_at(double t) const { return lambda_start + sweep_rate * t; }
    /// Nominal optical frequency (no tuning error).
    double nu_nominal(double t) const { return kSpeedOfLight / lambda_at(t); }
    /// Instantaneous optical frequency including the tuning nonlinearity.
    double nu_instant(double t) const;
    /// Relative power (0, 1] at a wavelength; linear interpolation.
    double envelope_at(double lambda) const;

    void validate() const;
};

/// Local frequency sweep rate in Hz/s: gamma = (c / lambda^2) * dlambda/dt.
double sweep_rate_hz(const SweepPlan& plan, double lambda);

/// Beat frequency of a path-delay mismatch: |gamma * delta_tau|.
double fringe_frequency(double gamma, double delta_tau);

struct AdcSpec {
    double sample_rate{0.0};  // Hz
    int bits{16};
    double noise_rms{0.0};    // relative to channel full scale

    void validate() const;
};

}  // namespace ovna
