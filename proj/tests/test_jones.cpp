#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "ovna/jones.hpp"

using namespace ovna;

namespace {

Eigen::MatrixXcd random_matrix(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = cdouble(g(rng), g(rng));
    return m;
}

/// Independent oracle: singular values from the eigenvalues of M†M.
std::vector<double> eigen_oracle(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m.adjoint() * m);
    std::vector<double> sv;
    for (int i = 0; i < solver.eigenvalues().size(); ++i)
        sv.push_back(std::sqrt(std::max(0.0, solver.eigenvalues()(i))));
    std::sort(sv.begin(), sv.end(), std::greater<double>());
    return sv;
}

}  // namespace

TEST_CASE("singular values: identity and scaled identity") {
    BlockTransferMatrix m(1, 193.4e12);
    m.entries = Eigen::MatrixXcd::Identity(2, 2);
    auto sv = svd_singular_values(m);
    REQUIRE(sv.size() == 2);
    CHECK(sv[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sv[1] == doctest::Approx(1.0).epsilon(1e-12));

    m.entries *= 0.5;
    sv = svd_singular_values(m);
    CHECK(sv[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sv[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("singular values match the M†M eigenvalue oracle") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 15);  // sizes 2..16
        const Eigen::MatrixXcd m = random_matrix(n, n, rng);
        const auto mine = singular_values(m);
        const auto oracle = eigen_oracle(m);
        REQUIRE(mine.size() == oracle.size());
        for (std::size_t i = 0; i < mine.size(); ++i) {
            CHECK(mine[i] >= 0.0);
            CHECK(std::abs(mine[i] - oracle[i]) <=
                  1e-9 * std::max(1.0, std::abs(oracle[i])));
        }
    }
}

TEST_CASE("singular values reject non-finite input") {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2, 2);
    m(0, 1) = cdouble(std::numeric_limits<double>::quiet_NaN(), 0.0);
    CHECK_THROWS_AS((void)singular_values(m), InvalidInputError);
}

TEST_CASE("waveplate: zero retardance, half-wave plate, composition") {
    const JonesMatrix id = waveplate(0.0, 0.7);
    CHECK(phase_aligned_distance(JonesMatrix::identity(), id) < 1e-12);

    // Half-wave plate on axis: diagonal with a pi phase split.
    const JonesMatrix half = waveplate(kPi, 0.0);
    JonesMatrix expected;
    expected.m00 = cdouble(0.0, 1.0);
    expected.m11 = cdouble(0.0, -1.0);
    CHECK(phase_aligned_distance(expected, half) < 1e-12);

    const JonesMatrix quarter = waveplate(kPi / 2.0, 0.0);
    const JonesMatrix composed = quarter * quarter;
    CHECK(phase_aligned_distance(half, composed) < 1e-12);
}

TEST_CASE("waveplate is unitary for arbitrary parameters") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int i = 0; i < 100; ++i) {
        const JonesMatrix m = waveplate(u(rng), u(rng));
        CHECK(m.unitarity_error() < 1e-10);
        CHECK(std::abs(std::abs(m.det()) - 1.0) < 1e-10);
    }
}

TEST_CASE("unitarity survives chains of 10^4 retarder factors") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    JonesMatrix chain = JonesMatrix::identity();
    for (int i = 0; i < 10000; ++i) chain = waveplate(u(rng), u(rng)) * chain;
    CHECK(chain.unitarity_error() < 1e-9);
}

TEST_CASE("dgd element: identity, periodicity, diagonal phase split") {
    CHECK(phase_aligned_distance(JonesMatrix::identity(), dgd_element(0.0, 200e12)) < 1e-12);

    const double tau = 0.7e-12;
    const double nu = 193.1e12;
    const JonesMatrix a = dgd_element(tau, nu);
    const JonesMatrix b = dgd_element(tau, nu + 1.0 / tau);
    CHECK(phase_aligned_distance(a, b) < 1e-9);

    // Diagonal phase difference = 2 pi nu tau (mod 2 pi).
    const double tau2 = 1e-12;
    const double nu2 = 193.4e12;
    const JonesMatrix d = dgd_element(tau2, nu2);
    const double split = std::arg(d.m00 / d.m11);
    const double expected = std::remainder(2.0 * kPi * nu2 * tau2, 2.0 * kPi);
    CHECK(std::remainder(split - expected, 2.0 * kPi) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("dgd elements compose additively on the same axis") {
    const double nu = 193.4e12;
    const JonesMatrix a = dgd_element(0.4e-12, nu);
    const JonesMatrix b = dgd_element(0.9e-12, nu);
    const JonesMatrix sum = dgd_element(1.3e-12, nu);
    CHECK(phase_aligned_distance(sum, a * b) < 1e-12);
}

TEST_CASE("jones to stokes: cardinal states and norm invariant") {
    const StokesVector h = jones_to_stokes({cdouble(1, 0), cdouble(0, 0)});
    CHECK(h.s0 == doctest::Approx(1.0));
    CHECK(h.s1 == doctest::Approx(1.0));
    CHECK(h.s2 == doctest::Approx(0.0));
    CHECK(h.s3 == doctest::Approx(0.0));

    const double r = 1.0 / std::sqrt(2.0);
    const StokesVector d = jones_to_stokes({cdouble(r, 0), cdouble(r, 0)});
    CHECK(d.s1 == doctest::Approx(0.0));
    CHECK(d.s2 == doctest::Approx(1.0));
    CHECK(d.s3 == doctest::Approx(0.0));

    const StokesVector c = jones_to_stokes({cdouble(r, 0), cdouble(0, r)});
    CHECK(c.s1 == doctest::Approx(0.0));
    CHECK(c.s2 == doctest::Approx(0.0));
    CHECK(c.s3 == doctest::Approx(1.0));

    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int i = 0; i < 200; ++i) {
        const JonesVector v{cdouble(g(rng), g(rng)), cdouble(g(rng), g(rng))};
        const StokesVector s = jones_to_stokes(v);
        CHECK(s.s1 * s.s1 + s.s2 * s.s2 + s.s3 * s.s3 ==
              doctest::Approx(s.s0 * s.s0).epsilon(1e-9));
    }
}

TEST_CASE("stokes angle: identical, orthogonal, quarter turns") {
    const StokesVector h = jones_to_stokes({cdouble(1, 0), cdouble(0, 0)});
    const StokesVector v = jones_to_stokes({cdouble(0, 0), cdouble(1, 0)});
    const double r = 1.0 / std::sqrt(2.0);
    const StokesVector d = jones_to_stokes({cdouble(r, 0), cdouble(r, 0)});

    CHECK(stokes_angle(h, h) == doctest::Approx(0.0));
    CHECK(stokes_angle(h, v) == doctest::Approx(kPi));
    CHECK(stokes_angle(h, d) == doctest::Approx(kPi / 2.0));
    CHECK_THROWS_AS((void)stokes_angle(h, StokesVector{}), InvalidInputError);
}

TEST_CASE("orthogonal state and overlap") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int i = 0; i < 50; ++i) {
        const JonesVector v =
            JonesVector{cdouble(g(rng), g(rng)), cdouble(g(rng), g(rng))}.normalized();
        const JonesVector p = orthogonal_state(v);
        CHECK(std::abs(overlap(v, p)) < 1e-12);
        CHECK(p.power() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("retarder about axis rotates Stokes vectors by the retardance") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    for (int i = 0; i < 50; ++i) {
        std::array<double, 3> axis{g(rng), g(rng), g(rng)};
        const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
        for (auto& x : axis) x /= n;
        std::uniform_real_distribution<double> u(-kPi, kPi);
        const double phi = u(rng);
        const JonesMatrix m = retarder_about_axis(axis, phi);
        CHECK(m.unitarity_error() < 1e-10);

        const JonesVector in =
            JonesVector{cdouble(g(rng), g(rng)), cdouble(g(rng), g(rng))}.normalized();
        const StokesVector s_in = jones_to_stokes(in);
        const StokesVector s_out = jones_to_stokes(m * in);
        // Rodrigues rotation of the Stokes part as the oracle; with this
        // library's Stokes sign convention the rotation sense is -phi.
        const double dot = s_in.s1 * axis[0] + s_in.s2 * axis[1] + s_in.s3 * axis[2];
        const double c = std::cos(phi);
        const double s = -std::sin(phi);
        const std::array<double, 3> sv{s_in.s1, s_in.s2, s_in.s3};
        const std::array<double, 3> cross{axis[1] * sv[2] - axis[2] * sv[1],
                                          axis[2] * sv[0] - axis[0] * sv[2],
                                          axis[0] * sv[1] - axis[1] * sv[0]};
        const std::array<double, 3> expect{
            sv[0] * c + cross[0] * s + axis[0] * dot * (1.0 - c),
            sv[1] * c + cross[1] * s + axis[1] * dot * (1.0 - c),
            sv[2] * c + cross[2] * s + axis[2] * dot * (1.0 - c)};
        CHECK(s_out.s1 == doctest::Approx(expect[0]).epsilon(1e-9));
        CHECK(s_out.s2 == doctest::Approx(expect[1]).epsilon(1e-9));
        CHECK(s_out.s3 == doctest::Approx(expect[2]).epsilon(1e-9));
    }
}

TEST_CASE("phase aligned distance ignores global phase only") {
    const JonesMatrix m = waveplate(1.1, 0.3);
    const JonesMatrix rotated = m * std::polar(1.0, 2.0);
    CHECK(phase_aligned_distance(m, rotated) < 1e-12);
    const JonesMatrix other = waveplate(1.2, 0.3);
    CHECK(phase_aligned_distance(m, other) > 1e-3);
}
