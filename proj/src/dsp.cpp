#include "ovna/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include <fftw3.h>

#include "ovna/errors.hpp"

namespace ovna {

namespace {

std::vector<cdouble> fft_forward(const std::vector<cdouble>& in) {
    std::vector<cdouble> out(in.size());
    fftw_plan plan = fftw_plan_dft_1d(
        static_cast<int>(in.size()),
        reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(in.data())),
        reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
        FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    return out;
}

std::vector<cdouble> fft_inverse(const std::vector<cdouble>& in) {
    std::vector<cdouble> out(in.size());
    fftw_plan plan = fftw_plan_dft_1d(
        static_cast<int>(in.size()),
        reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(in.data())),
        reinterpret_cast<fftw_complex*>(out.data()), FFTW_BACKWARD,
        FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    const double scale = 1.0 / static_cast<double>(in.size());
    for (auto& v : out) v *= scale;
    return out;
}

/// Analytic signal: suppress negative frequencies, double positive ones.
std::vector<cdouble> analytic_signal(const std::vector<float>& x) {
    const std::size_t n = x.size();
    std::vector<cdouble> buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = cdouble(static_cast<double>(x[i]), 0.0);
    auto spec = fft_forward(buf);
    const std::size_t half = n / 2;
    for (std::size_t k = 1; k < (n + 1) / 2; ++k) spec[k] *= 2.0;
    for (std::size_t k = half + 1; k < n; ++k) spec[k] = 0.0;
    return fft_inverse(spec);
}

/// Spectral zero-pad upsampling by an integer factor.
std::vector<double> upsample_real(const std::vector<float>& x, int factor) {
    const std::size_t n = x.size();
    if (factor <= 1) return std::vector<double>(x.begin(), x.end());
    std::vector<cdouble> buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = cdouble(static_cast<double>(x[i]), 0.0);
    auto spec = fft_forward(buf);
    const std::size_t m = n * static_cast<std::size_t>(factor);
    std::vector<cdouble> padded(m, cdouble(0.0, 0.0));
    const std::size_t half = n / 2;
    for (std::size_t k = 0; k <= half; ++k) padded[k] = spec[k];
    for (std::size_t k = half + 1; k < n; ++k) padded[m - n + k] = spec[k];
    if (n % 2 == 0) {
        // Split the Nyquist bin symmetrically to keep the sequence real.
        padded[half] *= 0.5;
        padded[m - half] = padded[half];
    }
    auto up = fft_inverse(padded);
    std::vector<double> out(m);
    const double scale = static_cast<double>(factor);
    for (std::size_t i = 0; i < m; ++i) out[i] = scale * up[i].real();
    return out;
}

double catmull_rom(const std::vector<double>& u, double pos) {
    const auto n = static_cast<std::ptrdiff_t>(u.size());
    auto i = static_cast<std::ptrdiff_t>(std::floor(pos));
    i = std::clamp<std::ptrdiff_t>(i, 1, n - 3);
    const double t = pos - static_cast<double>(i);
    const double p0 = u[static_cast<std::size_t>(i - 1)];
    const double p1 = u[static_cast<std::size_t>(i)];
    const double p2 = u[static_cast<std::size_t>(i + 1)];
    const double p3 = u[static_cast<std::size_t>(i + 2)];
    const double a = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
    const double b = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
    const double c = -0.5 * p0 + 0.5 * p2;
    return ((a * t + b) * t + c) * t + p1;
}

double tukey(double xi, double taper) {
    const double a = std::abs(xi);
    if (a >= 1.0) return 0.0;
    if (a <= 1.0 - taper) return 1.0;
    return 0.5 * (1.0 + std::cos(kPi * (a - (1.0 - taper)) / taper));
}

}  // namespace

void FrequencyGrid::validate() const {
    if (count < 2) throw InvalidInputError("FrequencyGrid: need at least 2 points");
    if (!(step > 0.0)) throw InvalidInputError("FrequencyGrid: step must be > 0");
    if (!std::isfinite(start) || !(start > 0.0))
        throw InvalidInputError("FrequencyGrid: start must be a positive frequency");
}

std::size_t FrequencyGrid::nearest(double nu) const {
    validate();
    if (nu < start - 0.5 * step || nu > end() + 0.5 * step)
        throw InvalidInputError("FrequencyGrid: frequency outside the grid");
    const double p = (nu - start) / step;
    const auto i = static_cast<std::ptrdiff_t>(std::llround(p));
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
        i, 0, static_cast<std::ptrdiff_t>(count) - 1));
}

ResampledSweep aux_phase_resample(const WaveformRecord& record, double aux_delay,
                                  double edge_margin, int upsample) {
    const std::size_t n = record.size();
    if (n < 64) throw InvalidInputError("aux_phase_resample: record too short");
    if (!(aux_delay > 0.0)) throw InvalidInputError("aux_phase_resample: aux_delay must be > 0");
    if (!(edge_margin >= 0.0) || edge_margin >= 0.4)
        throw InvalidInputError("aux_phase_resample: edge_margin must lie in [0, 0.4)");
    if (upsample < 1 || upsample > 16)
        throw InvalidInputError("aux_phase_resample: upsample factor must lie in [1, 16]");
    if (record.aux.size() != n || record.y.size() != n)
        throw InvalidInputError("aux_phase_resample: channel length mismatch");

    const auto analytic = analytic_signal(record.aux);

    // Unwrapped analytic phase; its slope is positive regardless of sweep
    // direction, so the sign is taken from the sweep metadata below.
    std::vector<double> phase(n);
    phase[0] = std::arg(analytic[0]);
    for (std::size_t i = 1; i < n; ++i) {
        const double d = std::arg(analytic[i] / analytic[i - 1]);
        if (std::abs(d) > 0.9 * kPi)
            throw PhaseUnwrapError("aux_phase_resample: phase step too large to unwrap", i);
        phase[i] = phase[i - 1] + d;
    }

    const double direction =
        (record.sweep.nu_nominal(record.sweep.duration()) >= record.sweep.nu_nominal(0.0)) ? 1.0
                                                                                           : -1.0;
    std::vector<double> nu_hat(n);
    for (std::size_t i = 0; i < n; ++i)
        nu_hat[i] = direction * phase[i] / (2.0 * kPi * aux_delay);
    // Anchor the relative estimate to the nominal sweep at mid-record.
    const std::size_t mid = n / 2;
    const double anchor =
        record.sweep.nu_nominal(static_cast<double>(mid) / record.sample_rate) - nu_hat[mid];
    for (auto& v : nu_hat) v += anchor;

    const auto margin = static_cast<std::size_t>(std::ceil(edge_margin * static_cast<double>(n)));
    const std::size_t lo = std::max<std::size_t>(margin, 2);
    const std::size_t hi = n - 1 - std::max<std::size_t>(margin, 2);
    if (hi <= lo + 16) throw InvalidInputError("aux_phase_resample: margins leave no data");
    for (std::size_t i = lo + 1; i <= hi; ++i)
        if ((nu_hat[i] - nu_hat[i - 1]) * direction <= 0.0)
            throw PhaseUnwrapError("aux_phase_resample: recovered sweep is not monotonic", i);

    const auto x_up = upsample_real(record.x, upsample);
    const auto y_up = upsample_real(record.y, upsample);

    const double nu_a = nu_hat[lo];
    const double nu_b = nu_hat[hi];
    const double nu_lo_v = std::min(nu_a, nu_b);
    const double nu_hi_v = std::max(nu_a, nu_b);
    const std::size_t count = hi - lo + 1;
    FrequencyGrid grid{nu_lo_v, (nu_hi_v - nu_lo_v) / static_cast<double>(count - 1), count};

    ResampledSweep out;
    out.grid = grid;
    out.x.resize(count);
    out.y.resize(count);
    const double up_f = static_cast<double>(upsample);
    for (std::size_t m = 0; m < count; ++m) {
        const double nu = grid.at(m);
        // Locate nu in the monotonic nu_hat and invert with a cubic fit of
        // sample index versus recovered frequency.
        std::size_t j;
        if (direction > 0.0) {
            j = static_cast<std::size_t>(
                std::upper_bound(nu_hat.begin() + static_cast<std::ptrdiff_t>(lo),
                                 nu_hat.begin() + static_cast<std::ptrdiff_t>(hi + 1), nu) -
                nu_hat.begin());
        } else {
            j = static_cast<std::size_t>(
                std::upper_bound(nu_hat.begin() + static_cast<std::ptrdiff_t>(lo),
                                 nu_hat.begin() + static_cast<std::ptrdiff_t>(hi + 1), nu,
                                 std::greater<double>()) -
                nu_hat.begin());
        }
        j = std::clamp<std::size_t>(j, lo + 2, hi - 1);
        double pos = 0.0;
        for (int k = -2; k <= 1; ++k) {
            const std::size_t idx = j + static_cast<std::size_t>(static_cast<std::ptrdiff_t>(k) + 2) - 2;
            double w = 1.0;
            for (int l = -2; l <= 1; ++l) {
                if (l == k) continue;
                const std::size_t jdx = j + static_cast<std::size_t>(static_cast<std::ptrdiff_t>(l) + 2) - 2;
                w *= (nu - nu_hat[jdx]) / (nu_hat[idx] - nu_hat[jdx]);
            }
            pos += w * static_cast<double>(idx);
        }
        const double up_pos = pos * up_f;
        out.x[m] = catmull_rom(x_up, up_pos);
        out.y[m] = catmull_rom(y_up, up_pos);
    }
    return out;
}

std::vector<ChannelSpec> plan_channels(const DelayPlan& plan,
                                       const std::vector<double>& core_group_delays) {
    const auto n_ports = static_cast<int>(plan.input_port_delays.size());
    if (!core_group_delays.empty() &&
        static_cast<int>(core_group_delays.size()) != n_ports)
        throw InvalidInputError("plan_channels: group-delay list does not match port count");
    std::vector<ChannelSpec> out;
    out.reserve(static_cast<std::size_t>(4 * n_ports * n_ports));
    for (const auto& key : enumerate_channels(plan)) {
        double gd = 0.0;
        if (!core_group_delays.empty())
            gd = 0.5 * (core_group_delays[static_cast<std::size_t>(key.in_port)] +
                        core_group_delays[static_cast<std::size_t>(key.out_port)]);
        out.push_back({key, plan.channel_delay(key.in_pol, key.in_port, key.out_port,
                                               key.out_pol) +
                                gd});
    }
    return out;
}

FrequencyGrid decimate_grid(const FrequencyGrid& grid, std::size_t out_points,
                            double edge_trim) {
    grid.validate();
    if (out_points < 2 || out_points > grid.count)
        throw InvalidInputError("decimate_grid: output count must lie in [2, input count]");
    if (!(edge_trim >= 0.0) || edge_trim >= 0.5)
        throw InvalidInputError("decimate_grid: edge_trim must lie in [0, 0.5)");
    const double span = grid.step * static_cast<double>(grid.count - 1);
    const double trimmed = span * (1.0 - 2.0 * edge_trim);
    return {grid.start + span * edge_trim, trimmed / static_cast<double>(out_points - 1),
            out_points};
}

std::vector<ChannelResponse> channelize(const ResampledSweep& resampled,
                                        const std::vector<ChannelSpec>& channels,
                                        const WindowSpec& window, std::size_t out_points) {
    resampled.grid.validate();
    if (channels.empty()) throw InvalidInputError("channelize: empty channel list");
    if (!(window.half_width > 0.0))
        throw ConfigError("channelize: window half-width must be > 0");
    if (!(window.taper > 0.0) || window.taper > 1.0)
        throw ConfigError("channelize: window taper must lie in (0, 1]");
    const std::size_t n = resampled.grid.count;
    if (resampled.x.size() != n || resampled.y.size() != n)
        throw InvalidInputError("channelize: channel length does not match the grid");
    const double delay_span = 1.0 / resampled.grid.step;  // full delay axis
    const double nyquist = 0.5 * delay_span;
    for (std::size_t a = 0; a < channels.size(); ++a) {
        const double tau = channels[a].delay;
        if (!(tau > window.half_width))
            throw ConfigError("channelize: channel delay too close to zero delay");
        if (!(tau < nyquist - window.half_width))
            throw ConfigError("channelize: channel delay exceeds the unambiguous range");
        for (std::size_t b = a + 1; b < channels.size(); ++b)
            if (std::abs(tau - channels[b].delay) < 2.0 * window.half_width * (1.0 - 1e-9)) {
                std::ostringstream msg;
                msg << "channelize: windows overlap between channels at delays " << tau
                    << " s and " << channels[b].delay << " s";
                throw ConfigError(msg.str());
            }
    }
    const FrequencyGrid out_grid = decimate_grid(resampled.grid, out_points);

    std::vector<cdouble> buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = cdouble(resampled.x[i], 0.0);
    const auto spec_x = fft_forward(buf);
    for (std::size_t i = 0; i < n; ++i) buf[i] = cdouble(resampled.y[i], 0.0);
    const auto spec_y = fft_forward(buf);

    const double bin_delay = delay_span / static_cast<double>(n);
    std::vector<ChannelResponse> out;
    out.reserve(channels.size());
    for (const auto& ch : channels) {
        const auto& spec = ch.key.out_pol ? spec_y : spec_x;
        const auto b_lo = static_cast<std::size_t>(
            std::ceil((ch.delay - window.half_width) / bin_delay));
        const auto b_hi = static_cast<std::size_t>(
            std::floor((ch.delay + window.half_width) / bin_delay));
        std::vector<cdouble> wspec;
        wspec.reserve(b_hi - b_lo + 1);
        for (std::size_t b = b_lo; b <= b_hi; ++b) {
            const double xi = (static_cast<double>(b) * bin_delay - ch.delay) / window.half_width;
            wspec.push_back(spec[b] * tukey(xi, window.taper));
        }
        ChannelResponse resp;
        resp.key = ch.key;
        resp.delay = ch.delay;
        resp.h.resize(out_points);
        // Direct evaluation of the windowed band on the decimated grid,
        // demodulated by the channel's own carrier e^{i 2 pi tau (nu - start)}.
        // Factor 2 restores the analytic amplitude of the real-valued input.
        const double scale = 2.0 / static_cast<double>(n);
        for (std::size_t m = 0; m < out_points; ++m) {
            const double p = (out_grid.at(m) - resampled.grid.start) / resampled.grid.step;
            const double base = 2.0 * kPi * p / static_cast<double>(n);
            cdouble acc(0.0, 0.0);
            const cdouble rot = std::polar(1.0, base);
            cdouble ph = std::polar(1.0, base * static_cast<double>(b_lo));
            for (std::size_t b = b_lo; b <= b_hi; ++b) {
                acc += wspec[b - b_lo] * ph;
                ph *= rot;
            }
            const double demod = -2.0 * kPi * ch.delay * (out_grid.at(m) - resampled.grid.start);
            resp.h[m] = scale * acc * std::polar(1.0, demod);
        }
        out.push_back(std::move(resp));
    }
    return out;
}

TransferFunctionEstimate assemble_transfer(const std::vector<ChannelResponse>& channels,
                                           const DelayPlan& plan, const FrequencyGrid& grid) {
    const auto n_ports = static_cast<int>(plan.input_port_delays.size());
    if (n_ports < 1) throw InvalidInputError("assemble_transfer: empty delay plan");
    if (channels.empty()) throw AssemblyError("assemble_transfer: no channel responses");
    grid.validate();
    const std::size_t count = channels.front().h.size();
    if (count != grid.count)
        throw AssemblyError("assemble_transfer: channel length does not match the grid");
    const int dim = 2 * n_ports;

    std::map<std::tuple<int, int, int, int>, const ChannelResponse*> index;
    for (const auto& ch : channels) {
        if (ch.h.size() != count)
            throw AssemblyError("assemble_transfer: channel grids have different lengths");
        index[{ch.key.in_pol, ch.key.in_port, ch.key.out_port, ch.key.out_pol}] = &ch;
    }

    std::ostringstream missing;
    bool any_missing = false;
    for (const auto& key : enumerate_channels(plan))
        if (!index.count({key.in_pol, key.in_port, key.out_port, key.out_pol})) {
            missing << (any_missing ? ", " : "") << "(in_pol=" << key.in_pol
                    << ", in_port=" << key.in_port << ", out_port=" << key.out_port
                    << ", out_pol=" << key.out_pol << ")";
            any_missing = true;
        }
    if (any_missing)
        throw AssemblyError("assemble_transfer: missing channels: " + missing.str());

    TransferFunctionEstimate est;
    est.grid = grid;
    est.n_channels = dim;
    est.h.assign(count, Eigen::MatrixXcd::Zero(dim, dim));
    for (const auto& ch : channels) {
        const int row = 2 * ch.key.out_port + ch.key.out_pol;
        const int col = 2 * ch.key.in_port + ch.key.in_pol;
        for (std::size_t m = 0; m < count; ++m) est.h[m](row, col) = ch.h[m];
    }
    return est;
}

TransferFunctionEstimate calibrate(const TransferFunctionEstimate& estimate,
                                   const Eigen::MatrixXcd& reference_at_cal,
                                   double lambda_cal) {
    if (estimate.h.empty()) throw CalibrationError("calibrate: empty estimate");
    if (!(lambda_cal > 0.0)) throw CalibrationError("calibrate: wavelength must be > 0");
    const std::size_t idx = estimate.grid.nearest(kSpeedOfLight / lambda_cal);
    const double est_power = estimate.h[idx].squaredNorm();
    const double ref_power = reference_at_cal.squaredNorm();
    if (!(est_power > 0.0))
        throw CalibrationError("calibrate: estimate vanishes at the calibration wavelength");
    if (!(ref_power > 0.0))
        throw CalibrationError("calibrate: reference vanishes at the calibration wavelength");
    const double scale = std::sqrt(ref_power / est_power);
    TransferFunctionEstimate out = estimate;
    for (auto& m : out.h) m *= scale;
    out.calibration_lambda = lambda_cal;
    return out;
}

double insertion_loss_db(const Eigen::MatrixXcd& m) {
    const auto sigma = singular_values(m);
    double mean_sq = 0.0;
    for (double s : sigma) mean_sq += s * s;
    mean_sq /= static_cast<double>(sigma.size());
    if (!(mean_sq > 0.0)) throw MetricError("insertion_loss_db: zero response");
    return -10.0 * std::log10(mean_sq);
}

double mdl_db(const Eigen::MatrixXcd& m) {
    const auto sigma = singular_values(m);
    const double s_max = sigma.front();
    const double s_min = sigma.back();
    if (!(s_max > 0.0)) throw MetricError("mdl_db: zero response");
    if (s_min <= s_max * 1e-150) return kMdlInfiniteDb;
    return 20.0 * std::log10(s_max / s_min);
}

Eigen::MatrixXd crosstalk_db(const Eigen::MatrixXcd& m, int n_cores) {
    if (n_cores < 1 || m.rows() != 2 * n_cores || m.cols() != 2 * n_cores)
        throw InvalidInputError("crosstalk_db: matrix size does not match the core count");
    Eigen::VectorXd diag(n_cores);
    for (int j = 0; j < n_cores; ++j) {
        diag(j) = m.block(2 * j, 2 * j, 2, 2).squaredNorm();
        if (!(diag(j) > 0.0))
            throw MetricError("crosstalk_db: zero direct response in a core");
    }
    Eigen::MatrixXd out(n_cores, n_cores);
    for (int j = 0; j < n_cores; ++j)
        for (int i = 0; i < n_cores; ++i) {
            if (i == j) {
                out(j, i) = kCrosstalkFloorDb;
                continue;
            }
            const double coupled = m.block(2 * j, 2 * i, 2, 2).squaredNorm();
            const double ratio = coupled / diag(j);
            out(j, i) = std::max(kCrosstalkFloorDb, 10.0 * std::log10(std::max(ratio, 0.0)));
        }
    return out;
}

MetricsSeries compute_metrics(const TransferFunctionEstimate& estimate, double lambda_cal) {
    if (estimate.h.empty()) throw InvalidInputError("compute_metrics: empty estimate");
    estimate.grid.validate();
    const int n_cores = estimate.n_channels / 2;
    const std::size_t cal_idx = estimate.grid.nearest(kSpeedOfLight / lambda_cal);
    const double il_cal = insertion_loss_db(estimate.h[cal_idx]);

    MetricsSeries series;
    const std::size_t count = estimate.h.size();
    series.wavelength.resize(count);
    series.il_db.resize(count);
    series.il_norm_db.resize(count);
    series.mdl_db.resize(count);
    series.xt_db.resize(count);
    // The grid ascends in frequency; emit ascending in wavelength.
    for (std::size_t m = 0; m < count; ++m) {
        const std::size_t src = count - 1 - m;
        const auto& h = estimate.h[src];
        series.wavelength[m] = kSpeedOfLight / estimate.grid.at(src);
        series.il_db[m] = insertion_loss_db(h);
        series.il_norm_db[m] = series.il_db[m] - il_cal;
        series.mdl_db[m] = mdl_db(h);
        if (n_cores < 2) {
            series.xt_db[m] = kCrosstalkFloorDb;
        } else {
            const Eigen::MatrixXd xt = crosstalk_db(h, n_cores);
            double mean_ratio = 0.0;
            int pairs = 0;
            for (int j = 0; j < n_cores; ++j)
                for (int i = 0; i < n_cores; ++i)
                    if (i != j) {
                        mean_ratio += std::pow(10.0, xt(j, i) / 10.0);
                        ++pairs;
                    }
            mean_ratio /= static_cast<double>(pairs);
            series.xt_db[m] =
                std::max(kCrosstalkFloorDb, 10.0 * std::log10(std::max(mean_ratio, 0.0)));
        }
    }
    return series;
}

std::vector<std::vector<double>> per_core_il_norm_db(const TransferFunctionEstimate& estimate,
                                                     double lambda_cal,
                                                     std::vector<double>& wavelength_out) {
    if (estimate.h.empty()) throw InvalidInputError("per_core_il_norm_db: empty estimate");
    estimate.grid.validate();
    const int n_cores = estimate.n_channels / 2;
    const std::size_t cal_idx = estimate.grid.nearest(kSpeedOfLight / lambda_cal);
    const std::size_t count = estimate.h.size();
    wavelength_out.resize(count);
    std::vector<std::vector<double>> out(static_cast<std::size_t>(n_cores),
                                         std::vector<double>(count));
    std::vector<double> cal_il(static_cast<std::size_t>(n_cores));
    for (int c = 0; c < n_cores; ++c)
        cal_il[static_cast<std::size_t>(c)] =
            insertion_loss_db(estimate.h[cal_idx].block(2 * c, 2 * c, 2, 2));
    for (std::size_t m = 0; m < count; ++m) {
        const std::size_t src = count - 1 - m;
        wavelength_out[m] = kSpeedOfLight / estimate.grid.at(src);
        for (int c = 0; c < n_cores; ++c)
            out[static_cast<std::size_t>(c)][m] =
                insertion_loss_db(estimate.h[src].block(2 * c, 2 * c, 2, 2)) -
                cal_il[static_cast<std::size_t>(c)];
    }
    return out;
}

}  // namespace ovna
