#include "ovna/sweep.hpp"

#include <cmath>

namespace ovna {

double SweepPlan::nu_instant(double t) const {
    double nu = nu_nominal(t);
    if (nonlinearity.amplitude_hz != 0.0)
        nu += nonlinearity.amplitude_hz * std::sin(2.0 * kPi * t / nonlinearity.period_s);
    return nu;
}

double SweepPlan::envelope_at(double lambda) const {
    if (power_envelope.empty()) return 1.0;
    if (lambda <= power_envelope.front().lambda) return power_envelope.front().relative;
    if (lambda >= power_envelope.back().lambda) return power_envelope.back().relative;
    for (std::size_t i = 1; i < power_envelope.size(); ++i) {
        if (lambda <= power_envelope[i].lambda) {
            const auto& a = power_envelope[i - 1];
            const auto& b = power_envelope[i];
            const double t = (lambda - a.lambda) / (b.lambda - a.lambda);
            return a.relative + t * (b.relative - a.relative);
        }
    }
    return power_envelope.back().relative;
}

void SweepPlan::validate() const {
    if (!(lambda_stop > lambda_start))
        throw ConfigError("SweepPlan: lambda_stop must exceed lambda_start");
    if (!(sweep_rate > 0.0)) throw ConfigError("SweepPlan: sweep_rate must be > 0");
    if (nonlinearity.amplitude_hz != 0.0 && !(nonlinearity.period_s > 0.0))
        throw ConfigError("SweepPlan: nonlinearity period must be > 0");
    for (const auto& p : power_envelope)
        if (!(p.relative > 0.0) || p.relative > 1.0)
            throw ConfigError("SweepPlan: envelope values must lie in (0, 1]");
    for (std::size_t i = 1; i < power_envelope.size(); ++i)
        if (!(power_envelope[i].lambda > power_envelope[i - 1].lambda))
            throw ConfigError("SweepPlan: envelope wavelengths must increase");
}

double sweep_rate_hz(const SweepPlan& plan, double lambda) {
    return kSpeedOfLight / (lambda * lambda) * plan.sweep_rate;
}

double fringe_frequency(double gamma, double delta_tau) {
    return std::abs(gamma * delta_tau);
}

void AdcSpec::validate() const {
    if (!(sample_rate > 0.0)) throw ConfigError("AdcSpec: sample_rate must be > 0");
    if (bits < 8 || bits > 24) throw ConfigError("AdcSpec: bits must lie in [8, 24]");
    if (noise_rms < 0.0) throw ConfigError("AdcSpec: noise_rms must be >= 0");
}

}  // namespace ovna
