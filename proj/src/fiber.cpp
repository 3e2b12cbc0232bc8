#include "ovna/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ovna {

namespace {

std::array<double, 3> random_unit_axis(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (true) {
        std::array<double, 3> v{gauss(rng), gauss(rng), gauss(rng)};
        const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        if (n > 1e-6) return {v[0] / n, v[1] / n, v[2] / n};
    }
}

JonesMatrix random_unitary(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.0, 2.0 * kPi);
    const JonesMatrix u = retarder_about_axis(random_unit_axis(rng), uni(rng));
    return u * std::polar(1.0, uni(rng));
}

}  // namespace

BirefringentFiber::BirefringentFiber(const BirefringentFiberSpec& spec) : spec_(spec) {
    if (spec.n_segments < 1)
        throw InvalidInputError("BirefringentFiberSpec: n_segments must be >= 1");
    if (spec.rms_dgd_target < 0.0)
        throw InvalidInputError("BirefringentFiberSpec: rms_dgd_target must be >= 0");
    std::mt19937_64 rng(spec.seed);
    const double tau_seg = spec.rms_dgd_target / std::sqrt(static_cast<double>(spec.n_segments));
    axes_.reserve(static_cast<std::size_t>(spec.n_segments));
    taus_.assign(static_cast<std::size_t>(spec.n_segments), tau_seg);
    for (int k = 0; k < spec.n_segments; ++k) axes_.push_back(random_unit_axis(rng));
}

JonesMatrix BirefringentFiber::jones(double nu) const {
    JonesMatrix j = JonesMatrix::identity();
    for (std::size_t k = 0; k < axes_.size(); ++k)
        j = retarder_about_axis(axes_[k], 2.0 * kPi * nu * taus_[k]) * j;
    return j;
}

JonesMatrix reference_jones(const BirefringentFiberSpec& spec, double nu) {
    return BirefringentFiber(spec).jones(nu);
}

namespace {

/// |eigenphase splitting| of a (near-)unitary 2x2 matrix, in (0, pi].
double eigenphase_split(const JonesMatrix& u) {
    const cdouble tr = u.m00 + u.m11;
    const cdouble disc = std::sqrt(tr * tr - 4.0 * u.det());
    const cdouble l1 = 0.5 * (tr + disc);
    const cdouble l2 = 0.5 * (tr - disc);
    if (std::abs(l2) == 0.0) return 0.0;
    return std::abs(std::arg(l1 / l2));
}

}  // namespace

double measure_rms_dgd(const BirefringentFiber& fiber, double nu_lo, double nu_hi,
                       int n_samples, double delta) {
    if (delta <= 0.0) throw InvalidInputError("measure_rms_dgd: delta must be > 0");
    if (!(nu_hi > nu_lo)) throw InvalidInputError("measure_rms_dgd: empty band");
    if (n_samples < 1) throw InvalidInputError("measure_rms_dgd: n_samples must be >= 1");
    double acc = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const double nu = n_samples == 1
                              ? 0.5 * (nu_lo + nu_hi)
                              : nu_lo + (nu_hi - nu_lo) * i / (n_samples - 1.0);
        const JonesMatrix u = fiber.jones(nu + delta) * fiber.jones(nu).dagger();
        const double tau = eigenphase_split(u) / (2.0 * kPi * delta);
        acc += tau * tau;
    }
    return std::sqrt(acc / n_samples);
}

double LossTable::at(double lam) const {
    if (lambda.empty()) return 0.0;
    if (lambda.size() != loss_db.size())
        throw InvalidInputError("LossTable: mismatched column lengths");
    if (lam <= lambda.front()) return loss_db.front();
    if (lam >= lambda.back()) return loss_db.back();
    const auto it = std::upper_bound(lambda.begin(), lambda.end(), lam);
    const std::size_t i = static_cast<std::size_t>(it - lambda.begin());
    const double t = (lam - lambda[i - 1]) / (lambda[i] - lambda[i - 1]);
    return loss_db[i - 1] + t * (loss_db[i] - loss_db[i - 1]);
}

MultiCoreFiber::MultiCoreFiber(const McfSpec& spec) : spec_(spec) {
    if (spec.n_cores < 1) throw InvalidInputError("McfSpec: n_cores must be >= 1");
    if (spec.crosstalk_db > 0.0)
        throw InvalidInputError("McfSpec: crosstalk level must be <= 0 dB");
    for (const auto& table : spec.core_loss)
        for (double l : table.loss_db)
            if (l < 0.0) throw InvalidInputError("McfSpec: loss must be >= 0 dB");
    if (spec_.core_loss.empty()) spec_.core_loss.resize(static_cast<std::size_t>(spec.n_cores));
    if (spec_.core_loss.size() != static_cast<std::size_t>(spec.n_cores))
        throw InvalidInputError("McfSpec: need one loss table per core");
    if (spec_.core_group_delays.empty())
        spec_.core_group_delays.assign(static_cast<std::size_t>(spec.n_cores), 0.0);
    if (spec_.core_group_delays.size() != static_cast<std::size_t>(spec.n_cores))
        throw InvalidInputError("McfSpec: need one group delay per core");

    std::mt19937_64 rng(spec.seed);
    const int n = spec.n_cores;
    core_rotation_.reserve(static_cast<std::size_t>(n));
    core_axis_.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        core_rotation_.push_back(random_unitary(rng));
        core_axis_.push_back(random_unit_axis(rng));
    }
    coupling_.resize(static_cast<std::size_t>(n) * n, Eigen::Matrix2cd::Zero());
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (i != j) {
                const JonesMatrix u = random_unitary(rng);
                coupling_[static_cast<std::size_t>(j) * n + i] = u.eigen();
            }
}

Eigen::Matrix2cd MultiCoreFiber::core_block(int out_core, int in_core, double nu) const {
    const int n = spec_.n_cores;
    const double lam = kSpeedOfLight / nu;
    const double loss_db = spec_.core_loss[static_cast<std::size_t>(out_core)].at(lam);
    const double amp = std::pow(10.0, -loss_db / 20.0);
    if (in_core == out_core) {
        const std::size_t i = static_cast<std::size_t>(in_core);
        const JonesMatrix biref =
            retarder_about_axis(core_axis_[i], 2.0 * kPi * nu * spec_.core_dgd);
        return amp * (core_rotation_[i] * biref).eigen();
    }
    if (spec_.crosstalk_db <= -300.0) return Eigen::Matrix2cd::Zero();
    const double xt_amp = std::pow(10.0, spec_.crosstalk_db / 20.0);
    return amp * xt_amp * coupling_[static_cast<std::size_t>(out_core) * n + in_core];
}

BlockTransferMatrix MultiCoreFiber::transfer(double nu) const {
    BlockTransferMatrix m(spec_.n_cores, nu);
    for (int j = 0; j < spec_.n_cores; ++j)
        for (int i = 0; i < spec_.n_cores; ++i)
            m.block(j, i) = core_block(j, i, nu);
    if (!m.entries.allFinite()) throw InternalError("dut_transfer: non-finite response");
    return m;
}

double MultiCoreFiber::path_group_delay(int out_core, int in_core) const {
    return 0.5 * (spec_.core_group_delays[static_cast<std::size_t>(out_core)] +
                  spec_.core_group_delays[static_cast<std::size_t>(in_core)]);
}

BlockTransferMatrix dut_transfer(const McfSpec& spec, double nu) {
    return MultiCoreFiber(spec).transfer(nu);
}

GroundTruthResponse sample_ground_truth(const MultiCoreFiber& fiber,
                                        const std::vector<double>& frequency) {
    for (std::size_t i = 1; i < frequency.size(); ++i)
        if (!(frequency[i] > frequency[i - 1]))
            throw InvalidInputError("ground truth grid must be strictly increasing");
    GroundTruthResponse gt;
    gt.frequency = frequency;
    gt.response.reserve(frequency.size());
    for (double nu : frequency) gt.response.push_back(fiber.transfer(nu));
    return gt;
}

double DelayPlan::channel_delay(int in_pol, int in_port, int out_port, int out_pol) const {
    return input_port_delays[static_cast<std::size_t>(in_port)] +
           output_port_delays[static_cast<std::size_t>(out_port)] +
           (in_pol ? input_pol_delay : 0.0) + (out_pol ? output_pol_delay : 0.0) -
           reference_delay;
}

std::vector<double> DelayPlan::all_delays() const {
    std::vector<double> d;
    const int n = n_ports();
    d.reserve(static_cast<std::size_t>(4 * n * n));
    for (int p = 0; p < 2; ++p)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int q = 0; q < 2; ++q) d.push_back(channel_delay(p, i, j, q));
    return d;
}

double DelayPlan::min_separation() const {
    std::vector<double> d = all_delays();
    std::sort(d.begin(), d.end());
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < d.size(); ++i) sep = std::min(sep, d[i] - d[i - 1]);
    return sep;
}

std::vector<ChannelKey> enumerate_channels(const DelayPlan& plan) {
    std::vector<ChannelKey> keys;
    const int n = plan.n_ports();
    keys.reserve(static_cast<std::size_t>(4 * n * n));
    for (int p = 0; p < 2; ++p)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int q = 0; q < 2; ++q) keys.push_back(ChannelKey{p, i, j, q});
    return keys;
}

DelayPlan build_delay_plan(int n_ports, double base_delay, double guard) {
    if (n_ports < 1) throw ConfigError("build_delay_plan: n_ports must be >= 1");
    if (!(guard > 0.0)) throw ConfigError("build_delay_plan: guard must be > 0");
    if (base_delay < 0.0) throw ConfigError("build_delay_plan: base_delay must be >= 0");
    DelayPlan plan;
    const double unit = guard;
    const double in_spacing = 4.0 * unit;
    const double out_spacing = 2.0 * n_ports * in_spacing;
    plan.output_pol_delay = unit;
    plan.input_pol_delay = 2.0 * unit;
    plan.guard = guard;
    plan.reference_delay = 0.0;
    for (int i = 0; i < n_ports; ++i) plan.input_port_delays.push_back(base_delay + i * in_spacing);
    for (int j = 0; j < n_ports; ++j) plan.output_port_delays.push_back(j * out_spacing);
    return plan;
}

}  // namespace ovna
