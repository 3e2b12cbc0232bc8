#pragma once

#include <limits>
#include <vector>

#include <Eigen/Core>

#include "ovna/fiber.hpp"
#include "ovna/jones.hpp"
#include "ovna/synth.hpp"

namespace ovna {

/// Uniform optical-frequency grid.
struct FrequencyGrid {
    double start{0.0};  // Hz
    double step{0.0};   // Hz
    std::size_t count{0};

    double at(std::size_t i) const { return start + step * static_cast<double>(i); }
    double end() const { return at(count ? count - 1 : 0); }
    void validate() const;
    /// Index of the grid point nearest to nu; throws InvalidInputError when
    /// nu lies outside the grid.
    std::size_t nearest(double nu) const;
};

/// Receiver waveforms resampled onto a uniform optical-frequency grid.
struct ResampledSweep {
    FrequencyGrid grid;
    std::vector<double> x, y;
};

/// Reconstructs the instantaneous optical frequency from the auxiliary
/// interferometer beat (analytic-signal phase, unwrapped, divided by
/// 2 pi aux_delay) and interpolates X/Y onto a uniform frequency grid.
/// `edge_margin` of the record is discarded at each end; the channels are
/// spectrally upsampled by `upsample` before cubic interpolation.
ResampledSweep aux_phase_resample(const WaveformRecord& record, double aux_delay,
                                  double edge_margin = 0.01, int upsample = 4);

/// Tapered-cosine window in the delay domain.
struct WindowSpec {
    double half_width{0.0};  // seconds; typically guard / 2
    double taper{0.25};      // fraction of the half-width spent rolling off
};

struct ChannelSpec {
    ChannelKey key;
    double delay{0.0};  // seconds, expected beat delay
};

/// Channel list of a delay plan, including per-core device group delays.
std::vector<ChannelSpec> plan_channels(const DelayPlan& plan,
                                       const std::vector<double>& core_group_delays = {});

struct ChannelResponse {
    ChannelKey key;
    double delay{0.0};
    std::vector<cdouble> h;  // complex response on the output grid
};

/// Output grid of the channelizer: `out_points` uniform samples across the
/// input grid with `edge_trim` of the span discarded at each end, clear of
/// the ringing the periodic delay-domain transform produces at the record
/// boundaries.
FrequencyGrid decimate_grid(const FrequencyGrid& grid, std::size_t out_points,
                            double edge_trim = 0.02);

/// Delay-domain demultiplexing: transform to the delay domain, window each
/// channel at its known delay, and evaluate the demodulated response on the
/// (decimated) output grid. Throws ConfigError when windows would overlap.
std::vector<ChannelResponse> channelize(const ResampledSweep& resampled,
                                        const std::vector<ChannelSpec>& channels,
                                        const WindowSpec& window, std::size_t out_points);

struct TransferFunctionEstimate {
    FrequencyGrid grid;
    std::vector<Eigen::MatrixXcd> h;  // 2N x 2N per grid point
    int n_channels{0};
    double calibration_lambda{0.0};  // meters; 0 when uncalibrated
};

/// Places the channel responses into the 2N x 2N matrix
/// (row = 2*out_port + out_pol, column = 2*in_port + in_pol).
/// Throws AssemblyError naming any missing channel.
TransferFunctionEstimate assemble_transfer(const std::vector<ChannelResponse>& channels,
                                           const DelayPlan& plan, const FrequencyGrid& grid);

/// Scalar normalization against a reference response at the calibration
/// wavelength: after calibration the estimate reproduces the reference's
/// insertion loss at lambda_cal. Throws CalibrationError on zero response.
TransferFunctionEstimate calibrate(const TransferFunctionEstimate& estimate,
                                   const Eigen::MatrixXcd& reference_at_cal,
                                   double lambda_cal);

/// Insertion loss: -10 log10(mean squared singular value).
/// Throws MetricError for an all-zero matrix.
double insertion_loss_db(const Eigen::MatrixXcd& m);

/// Reported for singular matrices instead of an error so metric series stay
/// total.
inline constexpr double kMdlInfiniteDb = std::numeric_limits<double>::infinity();

/// Mode-dependent loss: 10 log10(sigma_max^2 / sigma_min^2) >= 0.
double mdl_db(const Eigen::MatrixXcd& m);

/// Distinguished floor reported when a core pair has no measurable coupling.
inline constexpr double kCrosstalkFloorDb = -120.0;

/// Crosstalk matrix: entry (j, i) = 10 log10(||block_ji||_F^2 / ||block_jj||_F^2)
/// for i != j; diagonal entries carry the floor value.
/// Throws MetricError on a zero diagonal block.
Eigen::MatrixXd crosstalk_db(const Eigen::MatrixXcd& m, int n_cores);

/// Per-wavelength metric series, ascending in wavelength.
struct MetricsSeries {
    std::vector<double> wavelength;  // meters
    std::vector<double> il_db;
    std::vector<double> il_norm_db;  // relative to the calibration wavelength
    std::vector<double> mdl_db;
    std::vector<double> xt_db;       // mean coupled/direct ratio; floor for N = 1
};

MetricsSeries compute_metrics(const TransferFunctionEstimate& estimate, double lambda_cal);

/// Per-core normalized insertion loss (diagonal 2x2 blocks), ascending in
/// wavelength; rows = cores.
std::vector<std::vector<double>> per_core_il_norm_db(const TransferFunctionEstimate& estimate,
                                                     double lambda_cal,
                                                     std::vector<double>& wavelength_out);

}  // namespace ovna
