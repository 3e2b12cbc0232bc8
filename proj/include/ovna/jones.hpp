#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Core>

#include "ovna/errors.hpp"

namespace ovna {

using cdouble = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Transverse optical field amplitude in a fixed x/y basis.
struct JonesVector {
    cdouble ex{0.0, 0.0};
    cdouble ey{0.0, 0.0};

    double power() const { return std::norm(ex) + std::norm(ey); }
    JonesVector normalized() const;
};

/// Inner product <a, b> = a† b.
cdouble overlap(const JonesVector& a, const JonesVector& b);

/// Unit vector orthogonal to v (v must have nonzero power).
JonesVector orthogonal_state(const JonesVector& v);

/// 2x2 complex transfer matrix acting on Jones vectors.
struct JonesMatrix {
    // Row-major entries: [[m00, m01], [m10, m11]].
    cdouble m00{0.0, 0.0}, m01{0.0, 0.0}, m10{0.0, 0.0}, m11{0.0, 0.0};

    static JonesMatrix identity();

    JonesMatrix dagger() const;
    cdouble det() const;
    double frobenius_norm() const;
    /// ||J†J - I||_F, zero for unitary matrices.
    double unitarity_error() const;

    JonesMatrix operator*(const JonesMatrix& rhs) const;
    JonesVector operator*(const JonesVector& v) const;
    JonesMatrix operator*(cdouble s) const;
    JonesMatrix operator-(const JonesMatrix& rhs) const;
    Eigen::Matrix2cd eigen() const;
};

/// Frobenius distance after aligning the global phase of b to a. The phase
/// is fixed by the largest-magnitude entry of a; absolute phase is not an
/// observable of interferometric extraction.
double phase_aligned_distance(const JonesMatrix& a, const JonesMatrix& b);

/// Linear retarder: retardance (rad) about an axis rotated by `orientation`
/// (rad, physical angle) from horizontal. Zero retardance gives identity.
JonesMatrix waveplate(double retardance, double orientation);

/// Coordinate rotation by `angle` (rad).
JonesMatrix rotator(double angle);

/// Elliptical retarder: rotation by `retardance` about the unit Stokes axis
/// (n1, n2, n3) on the Poincare sphere.
JonesMatrix retarder_about_axis(const std::array<double, 3>& axis, double retardance);

/// Differential-group-delay element with group-delay split tau evaluated at
/// optical frequency nu: diag(exp(+i pi nu tau), exp(-i pi nu tau)).
JonesMatrix dgd_element(double tau, double nu);

/// Polarization state in Stokes parameters. s0 carries optical power,
/// s1..s3 are in the same units (fully polarized light has |s| = s0).
struct StokesVector {
    double s0{0.0}, s1{0.0}, s2{0.0}, s3{0.0};
};

StokesVector jones_to_stokes(const JonesVector& v);

/// Angle in [0, pi] between the normalized (s1,s2,s3) parts of two states.
/// Throws InvalidInputError for zero-power input.
double stokes_angle(const StokesVector& a, const StokesVector& b);

/// 2N x 2N complex linear response of an N-spatial-channel device sampled at
/// one optical frequency. Row/column index = 2*port + polarization.
struct BlockTransferMatrix {
    int n_channels{0};
    Eigen::MatrixXcd entries;
    double frequency{0.0};

    BlockTransferMatrix() = default;
    BlockTransferMatrix(int n, double freq)
        : n_channels(n), entries(Eigen::MatrixXcd::Zero(2 * n, 2 * n)), frequency(freq) {}

    Eigen::Block<Eigen::MatrixXcd, 2, 2> block(int out_port, int in_port) {
        return entries.block<2, 2>(2 * out_port, 2 * in_port);
    }
    Eigen::Block<const Eigen::MatrixXcd, 2, 2> block(int out_port, int in_port) const {
        return entries.block<2, 2>(2 * out_port, 2 * in_port);
    }
};

/// Singular values of an arbitrary complex matrix, descending. One-sided
/// Jacobi with rotation tolerance 1e-12; exact (single rotation) for 2x2.
/// Throws InvalidInputError on non-finite entries.
std::vector<double> singular_values(const Eigen::MatrixXcd& m);

std::vector<double> svd_singular_values(const BlockTransferMatrix& m);

}  // namespace ovna
