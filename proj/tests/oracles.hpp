#pragma once

// Test-only reference computations. Nothing here calls into the beam-splitter
// or aperture-quadrature code it is used to check.

#include "twophoton/biphoton.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using twophoton::Complex;

/// Haar-random U(2): QR of a complex Ginibre matrix with the phases of R's
/// diagonal folded back into Q.
inline Eigen::Matrix2cd haar_unitary(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Matrix2cd z;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) z(i, j) = Complex(n(rng), n(rng));
    Eigen::HouseholderQR<Eigen::Matrix2cd> qr(z);
    Eigen::Matrix2cd q = qr.householderQ();
    Eigen::Matrix2cd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < 2; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
    return q;
}

inline double gaussian_beam_radius(double waist, double wavelength, double z) {
    const double zr = std::numbers::pi * waist * waist / wavelength;
    return waist * std::sqrt(1.0 + (z / zr) * (z / zr));
}

/// Two-photon scattering through a lossless splitter by explicit mode
/// enumeration. Single-photon modes are (port, pixel, polarization) on a
/// square grid whose pixels are mirror symmetric in y. The splitter is built
/// as a dense single-photon unitary and applied to every creation-operator
/// pair of the input state; the output coefficient matrix is symmetrized so
/// that A = C + C^T is the detection amplitude.
class ModeEnumerationSplitter {
public:
    ModeEnumerationSplitter(int nx, int ny) : nx_(nx), ny_(ny), pixels_(nx * ny), modes_(2 * 2 * nx * ny) {
        const double t = 1.0 / std::numbers::sqrt2;
        const Complex r(0.0, 1.0 / std::numbers::sqrt2);
        unitary_ = Eigen::MatrixXcd::Zero(modes_, modes_);
        for (int p = 0; p < pixels_; ++p) {
            const int mp = mirror(p);
            for (int pol = 0; pol < 2; ++pol) {
                // input port a -> out port 1 (t, same pixel) and out port 2 (r, mirrored)
                unitary_(mode(0, p, pol), mode(0, p, pol)) += t;
                unitary_(mode(1, mp, pol), mode(0, p, pol)) += r;
                // input port b -> out port 2 (t) and out port 1 (r, mirrored)
                unitary_(mode(1, p, pol), mode(1, p, pol)) += t;
                unitary_(mode(0, mp, pol), mode(1, p, pol)) += r;
            }
        }
    }

    const Eigen::MatrixXcd& unitary() const { return unitary_; }
    int mode(int port, int pixel, int pol) const { return (port * pixels_ + pixel) * 2 + pol; }
    int mirror(int pixel) const {
        const int ix = pixel % nx_;
        const int iy = pixel / nx_;
        return (ny_ - 1 - iy) * nx_ + ix;
    }
    int pixels() const { return pixels_; }

    /// input(p1, p2, pa, pb): amplitude for photon a in pixel p1 with
    /// polarization pa, photon b in pixel p2 with polarization pb.
    /// Returns A (modes x modes), symmetric.
    template <class Input>
    Eigen::MatrixXcd scatter(Input&& input) const {
        // sum_in amp * U[:, ia] U[:, ib]^T  ==  U * C_in * U^T
        Eigen::MatrixXcd cin = Eigen::MatrixXcd::Zero(modes_, modes_);
        for (int p1 = 0; p1 < pixels_; ++p1)
            for (int p2 = 0; p2 < pixels_; ++p2)
                for (int pa = 0; pa < 2; ++pa)
                    for (int pb = 0; pb < 2; ++pb) cin(mode(0, p1, pa), mode(1, p2, pb)) = input(p1, p2, pa, pb);
        const Eigen::MatrixXcd c = unitary_ * cin * unitary_.transpose();
        return c + c.transpose();
    }

private:
    int nx_;
    int ny_;
    int pixels_;
    int modes_;
    Eigen::MatrixXcd unitary_;
};

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

} // namespace oracle
