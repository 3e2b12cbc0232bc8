#pragma once

#include <cstdint>
#include <vector>

#include "ovna/jones.hpp"

namespace ovna {

/// Statistical model of a long birefringent fiber: a fixed concatenation of
/// random elliptical retarders whose joint differential group delay has the
/// requested RMS value over an ensemble of seeds.
struct BirefringentFiberSpec {
    int n_segments{1};
    double rms_dgd_target{0.0};  // seconds
    double group_delay{0.0};     // seconds, bulk delay (enters the delay plan)
    std::uint64_t seed{0};
};

class BirefringentFiber {
public:
    explicit BirefringentFiber(const BirefringentFiberSpec& spec);

    const BirefringentFiberSpec& spec() const { return spec_; }

    /// Frequency-dependent unitary response. Deterministic in (seed, nu).
    JonesMatrix jones(double nu) const;

private:
    BirefringentFiberSpec spec_;
    std::vector<std::array<double, 3>> axes_;
    std::vector<double> taus_;
};

JonesMatrix reference_jones(const BirefringentFiberSpec& spec, double nu);

/// DGD estimated from the eigenvalue splitting of J(nu+delta) J(nu)^-1,
/// RMS-averaged over n_samples points across [nu_lo, nu_hi].
/// Throws InvalidInputError for a degenerate step (delta <= 0).
double measure_rms_dgd(const BirefringentFiber& fiber, double nu_lo, double nu_hi,
                       int n_samples = 256, double delta = 1e8);

/// Loss-vs-wavelength table with linear interpolation, flat extrapolation.
struct LossTable {
    std::vector<double> lambda;   // meters, strictly increasing
    std::vector<double> loss_db;  // >= 0
    double at(double lam) const;
};

/// Multi-core fiber under test: uncoupled cores with per-core loss spectra
/// and unitary birefringence, plus weak static inter-core coupling.
struct McfSpec {
    int n_cores{1};
    std::vector<LossTable> core_loss;          // one table per core
    double crosstalk_db{-300.0};               // coupled/direct power ratio; <= 0
    std::vector<double> core_group_delays;     // seconds, one per core
    double core_dgd{0.0};                      // seconds, per-core birefringence
    std::uint64_t seed{0};
};

class MultiCoreFiber {
public:
    explicit MultiCoreFiber(const McfSpec& spec);

    const McfSpec& spec() const { return spec_; }

    /// 2x2 block of the response from input core i to output core j.
    Eigen::Matrix2cd core_block(int out_core, int in_core, double nu) const;

    BlockTransferMatrix transfer(double nu) const;

    /// Group delay attributed to the i -> j path.
    double path_group_delay(int out_core, int in_core) const;

private:
    McfSpec spec_;
    std::vector<JonesMatrix> core_rotation_;          // fixed random unitary per core
    std::vector<std::array<double, 3>> core_axis_;    // birefringence axis per core
    std::vector<Eigen::Matrix2cd> coupling_;          // unit-norm coupling per core pair
};

BlockTransferMatrix dut_transfer(const McfSpec& spec, double nu);

/// Ground-truth response sampled on a frequency grid.
struct GroundTruthResponse {
    std::vector<double> frequency;  // Hz, strictly increasing
    std::vector<BlockTransferMatrix> response;
};

GroundTruthResponse sample_ground_truth(const MultiCoreFiber& fiber,
                                        const std::vector<double>& frequency);

/// Time-multiplexing plan: every (input polarization, input port, output
/// port, output polarization) combination beats at a distinct delay.
struct DelayPlan {
    double input_pol_delay{0.0};             // seconds, second launch polarization
    double output_pol_delay{0.0};            // seconds, second receiver branch
    std::vector<double> input_port_delays;   // seconds
    std::vector<double> output_port_delays;  // seconds
    double reference_delay{0.0};             // seconds
    double guard{0.0};                       // seconds, minimum pairwise separation

    int n_ports() const { return static_cast<int>(input_port_delays.size()); }

    /// Delay of one channel relative to the reference arm.
    double channel_delay(int in_pol, int in_port, int out_port, int out_pol) const;

    /// All 4*N*N channel delays in fixed (in_pol, in_port, out_port, out_pol)
    /// iteration order.
    std::vector<double> all_delays() const;

    /// Minimum pairwise separation of all channel delays.
    double min_separation() const;
};

/// One delay-multiplexed channel of the interferogram.
struct ChannelKey {
    int in_pol{0};    // 0/1 launch polarization
    int in_port{0};
    int out_port{0};
    int out_pol{0};   // 0/1 receiver branch
};

std::vector<ChannelKey> enumerate_channels(const DelayPlan& plan);

/// Plan with input port spacing 4*guard and output port spacing
/// (2*n_ports)*input spacing; polarization offsets fill the remaining slots
/// so all 4*N*N delays are distinct with separation >= guard.
DelayPlan build_delay_plan(int n_ports, double base_delay, double guard);

}  // namespace ovna
