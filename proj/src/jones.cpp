#include "ovna/jones.hpp"

#include <algorithm>
#include <cmath>

namespace ovna {

JonesVector JonesVector::normalized() const {
    const double p = power();
    if (p <= 0.0) throw InvalidInputError("cannot normalize zero-power Jones vector");
    const double s = 1.0 / std::sqrt(p);
    return {ex * s, ey * s};
}

cdouble overlap(const JonesVector& a, const JonesVector& b) {
    return std::conj(a.ex) * b.ex + std::conj(a.ey) * b.ey;
}

JonesVector orthogonal_state(const JonesVector& v) {
    const JonesVector n = v.normalized();
    return {-std::conj(n.ey), std::conj(n.ex)};
}

JonesMatrix JonesMatrix::identity() {
    return {cdouble(1.0, 0.0), cdouble(0.0, 0.0), cdouble(0.0, 0.0), cdouble(1.0, 0.0)};
}

JonesMatrix JonesMatrix::dagger() const {
    return {std::conj(m00), std::conj(m10), std::conj(m01), std::conj(m11)};
}

cdouble JonesMatrix::det() const { return m00 * m11 - m01 * m10; }

double JonesMatrix::frobenius_norm() const {
    return std::sqrt(std::norm(m00) + std::norm(m01) + std::norm(m10) + std::norm(m11));
}

double JonesMatrix::unitarity_error() const {
    const JonesMatrix g = dagger() * (*this);
    return std::sqrt(std::norm(g.m00 - 1.0) + std::norm(g.m01) + std::norm(g.m10) +
                     std::norm(g.m11 - 1.0));
}

JonesMatrix JonesMatrix::operator*(const JonesMatrix& r) const {
    return {m00 * r.m00 + m01 * r.m10, m00 * r.m01 + m01 * r.m11,
            m10 * r.m00 + m11 * r.m10, m10 * r.m01 + m11 * r.m11};
}

JonesVector JonesMatrix::operator*(const JonesVector& v) const {
    return {m00 * v.ex + m01 * v.ey, m10 * v.ex + m11 * v.ey};
}

JonesMatrix JonesMatrix::operator*(cdouble s) const {
    return {m00 * s, m01 * s, m10 * s, m11 * s};
}

JonesMatrix JonesMatrix::operator-(const JonesMatrix& r) const {
    return {m00 - r.m00, m01 - r.m01, m10 - r.m10, m11 - r.m11};
}

Eigen::Matrix2cd JonesMatrix::eigen() const {
    Eigen::Matrix2cd m;
    m << m00, m01, m10, m11;
    return m;
}

double phase_aligned_distance(const JonesMatrix& a, const JonesMatrix& b) {
    // Pick the largest-magnitude entry of a as the phase anchor.
    const cdouble* ea[4] = {&a.m00, &a.m01, &a.m10, &a.m11};
    const cdouble* eb[4] = {&b.m00, &b.m01, &b.m10, &b.m11};
    int k = 0;
    for (int i = 1; i < 4; ++i)
        if (std::abs(*ea[i]) > std::abs(*ea[k])) k = i;
    cdouble phase(1.0, 0.0);
    const cdouble prod = std::conj(*eb[k]) * (*ea[k]);
    if (std::abs(prod) > 0.0) phase = prod / std::abs(prod);
    return (a - b * phase).frobenius_norm();
}

JonesMatrix rotator(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {cdouble(c, 0.0), cdouble(-s, 0.0), cdouble(s, 0.0), cdouble(c, 0.0)};
}

JonesMatrix waveplate(double retardance, double orientation) {
    if (!std::isfinite(retardance) || !std::isfinite(orientation))
        throw InvalidInputError("waveplate: non-finite parameter");
    const cdouble ep = std::polar(1.0, retardance / 2.0);
    const cdouble em = std::polar(1.0, -retardance / 2.0);
    const JonesMatrix d{ep, cdouble(0.0, 0.0), cdouble(0.0, 0.0), em};
    return rotator(orientation) * d * rotator(-orientation);
}

JonesMatrix retarder_about_axis(const std::array<double, 3>& axis, double retardance) {
    // exp(i (phi/2) n.sigma) with sigma matching the Stokes mapping below.
    const double c = std::cos(retardance / 2.0);
    const double s = std::sin(retardance / 2.0);
    const double n1 = axis[0], n2 = axis[1], n3 = axis[2];
    // n.sigma with sigma1 = diag(1,-1), sigma2 = [[0,1],[1,0]],
    // sigma3 = [[0,-i],[i,0]] (right-circular maps to +s3).
    return {cdouble(c, s * n1), cdouble(s * n3, s * n2),
            cdouble(-s * n3, s * n2), cdouble(c, -s * n1)};
}

JonesMatrix dgd_element(double tau, double nu) {
    if (tau < 0.0) throw InvalidInputError("dgd_element: tau must be >= 0");
    const double phi = kPi * nu * tau;
    return {std::polar(1.0, phi), cdouble(0.0, 0.0), cdouble(0.0, 0.0), std::polar(1.0, -phi)};
}

StokesVector jones_to_stokes(const JonesVector& v) {
    const cdouble cross = v.ex * std::conj(v.ey);
    return {std::norm(v.ex) + std::norm(v.ey), std::norm(v.ex) - std::norm(v.ey),
            2.0 * cross.real(), -2.0 * cross.imag()};
}

double stokes_angle(const StokesVector& a, const StokesVector& b) {
    const double na = std::sqrt(a.s1 * a.s1 + a.s2 * a.s2 + a.s3 * a.s3);
    const double nb = std::sqrt(b.s1 * b.s1 + b.s2 * b.s2 + b.s3 * b.s3);
    if (a.s0 <= 0.0 || b.s0 <= 0.0 || na <= 0.0 || nb <= 0.0)
        throw InvalidInputError("stokes_angle: zero-power input");
    double c = (a.s1 * b.s1 + a.s2 * b.s2 + a.s3 * b.s3) / (na * nb);
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c);
}

std::vector<double> singular_values(const Eigen::MatrixXcd& m) {
    if (!m.allFinite()) throw InvalidInputError("singular_values: non-finite entries");
    // One-sided Jacobi: orthogonalize column pairs with exact 2x2 Hermitian
    // rotations until all cross products vanish.
    Eigen::MatrixXcd a = m;
    const Eigen::Index n = a.cols();
    if (a.rows() < n) a = Eigen::MatrixXcd(m.adjoint());
    const double scale = a.norm();
    const double tol = 1e-12;
    const int max_sweeps = 60;
    if (scale > 0.0) {
        for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            double off = 0.0;
            for (Eigen::Index p = 0; p + 1 < a.cols(); ++p) {
                for (Eigen::Index q = p + 1; q < a.cols(); ++q) {
                    const double alpha = a.col(p).squaredNorm();
                    const double beta = a.col(q).squaredNorm();
                    const cdouble g = a.col(p).dot(a.col(q));  // conj(p) . q
                    const double ag = std::abs(g);
                    off = std::max(off, ag);
                    if (ag <= tol * std::max(alpha, beta)) continue;
                    // Eigenvectors of [[alpha, g], [conj(g), beta]].
                    const double d = 0.5 * (alpha - beta);
                    const double r = std::hypot(d, ag);
                    const double lam = 0.5 * (alpha + beta) + r;
                    cdouble v1, v2;
                    if (std::abs(lam - alpha) > std::abs(lam - beta)) {
                        v1 = g;
                        v2 = cdouble(lam - alpha, 0.0);
                    } else {
                        v1 = cdouble(lam - beta, 0.0);
                        v2 = std::conj(g);
                    }
                    const double nn = std::sqrt(std::norm(v1) + std::norm(v2));
                    if (nn == 0.0) continue;
                    v1 /= nn;
                    v2 /= nn;
                    const Eigen::VectorXcd cp = a.col(p) * v1 + a.col(q) * v2;
                    const Eigen::VectorXcd cq =
                        a.col(p) * (-std::conj(v2)) + a.col(q) * std::conj(v1);
                    a.col(p) = cp;
                    a.col(q) = cq;
                }
            }
            if (off <= tol * scale * scale) break;
        }
    }
    std::vector<double> sv(static_cast<std::size_t>(a.cols()));
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        sv[static_cast<std::size_t>(j)] = a.col(j).norm();
    std::sort(sv.begin(), sv.end(), std::greater<double>());
    return sv;
}

std::vector<double> svd_singular_values(const BlockTransferMatrix& m) {
    return singular_values(m.entries);
}

}  // namespace ovna
