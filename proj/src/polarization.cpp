#include "twophoton/polarization.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace twophoton {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

} // namespace

Jones basis_vector(PolBasis b) {
    switch (b) {
    case PolBasis::H: return Jones(1.0, 0.0);
    case PolBasis::V: return Jones(0.0, 1.0);
    case PolBasis::Plus: return Jones(kInvSqrt2, kInvSqrt2);
    case PolBasis::Minus: return Jones(kInvSqrt2, -kInvSqrt2);
    }
    throw std::invalid_argument("unknown polarization basis");
}

const char* to_string(BellKind kind) {
    switch (kind) {
    case BellKind::PsiMinus: return "psi_minus";
    case BellKind::PsiPlus: return "psi_plus";
    case BellKind::PhiMinus: return "phi_minus";
    case BellKind::PhiPlus: return "phi_plus";
    }
    return "?";
}

TwoPhotonPolState::TwoPhotonPolState(const PolAmplitudes& amplitudes) : amplitudes_(amplitudes) {
    const double n2 = amplitudes_.squaredNorm();
    if (!(std::abs(n2 - 1.0) <= kNormTolerance)) {
        throw std::invalid_argument("two-photon polarization state is not normalized (|s|^2 = " +
                                    std::to_string(n2) + ")");
    }
}

TwoPhotonPolState TwoPhotonPolState::normalized(const PolAmplitudes& amplitudes) {
    const double n = amplitudes.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw std::invalid_argument("cannot normalize a zero or non-finite polarization vector");
    }
    return TwoPhotonPolState(amplitudes / n);
}

TwoPhotonPolState TwoPhotonPolState::product(const Jones& photon1, const Jones& photon2) {
    PolAmplitudes a;
    a << photon1[0] * photon2[0], photon1[0] * photon2[1], photon1[1] * photon2[0],
        photon1[1] * photon2[1];
    return normalized(a);
}

PolAmplitudes swap_photons(const PolAmplitudes& a) {
    PolAmplitudes s = a;
    std::swap(s[1], s[2]);
    return s;
}

TwoPhotonPolState TwoPhotonPolState::swapped() const {
    return TwoPhotonPolState(swap_photons(amplitudes_));
}

double fidelity(const TwoPhotonPolState& a, const TwoPhotonPolState& b) {
    return std::norm(a.amplitudes().dot(b.amplitudes()));
}

LocalUnitary::LocalUnitary(const Eigen::Matrix2cd& matrix) : matrix_(matrix) {
    const double dev = (matrix_.adjoint() * matrix_ - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
    if (!(dev <= kUnitarityTolerance)) {
        throw std::invalid_argument("matrix is not unitary (max |U^dagger U - I| = " +
                                    std::to_string(dev) + ")");
    }
}

LocalUnitary LocalUnitary::identity() { return LocalUnitary(Eigen::Matrix2cd::Identity()); }

TwoPhotonPolState bell_state(BellKind kind) {
    PolAmplitudes a = PolAmplitudes::Zero();
    switch (kind) {
    case BellKind::PsiMinus:
        a[1] = kInvSqrt2;
        a[2] = -kInvSqrt2;
        break;
    case BellKind::PsiPlus:
        a[1] = kInvSqrt2;
        a[2] = kInvSqrt2;
        break;
    case BellKind::PhiMinus:
        a[0] = kInvSqrt2;
        a[3] = -kInvSqrt2;
        break;
    case BellKind::PhiPlus:
        a[0] = kInvSqrt2;
        a[3] = kInvSqrt2;
        break;
    }
    return TwoPhotonPolState(a);
}

TwoPhotonPolState apply_two_qubit(const LocalUnitary& u1, const LocalUnitary& u2,
                                  const TwoPhotonPolState& s) {
    // Row-major (photon1, photon2) index ordering makes this the Kronecker product.
    Eigen::Matrix4cd k;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            k.block<2, 2>(2 * i, 2 * j) = u1.matrix()(i, j) * u2.matrix();
    PolAmplitudes out = k * s.amplitudes();
    // Renormalize away rounding so the result passes the constructor check.
    return TwoPhotonPolState(out / out.norm());
}

LocalUnitary wave_plate(RetarderKind kind, double fast_axis_angle) {
    const double retardance = kind == RetarderKind::Half ? std::numbers::pi : std::numbers::pi / 2;
    const double c = std::cos(fast_axis_angle);
    const double s = std::sin(fast_axis_angle);
    Eigen::Matrix2cd rot;
    rot << c, -s, s, c;
    Eigen::Matrix2cd phase = Eigen::Matrix2cd::Zero();
    phase(0, 0) = 1.0;
    phase(1, 1) = std::polar(1.0, retardance);
    return LocalUnitary(rot * phase * rot.adjoint());
}

ExchangeParts exchange_projections(const TwoPhotonPolState& s) {
    const PolAmplitudes& a = s.amplitudes();
    const PolAmplitudes b = swap_photons(a);
    return {0.5 * (a + b), 0.5 * (a - b)};
}

Complex project(const PolAmplitudes& s, const Jones& a1, const Jones& a2) {
    Complex acc = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            acc += std::conj(a1[i]) * std::conj(a2[j]) * s[2 * i + j];
    return acc;
}

double analyzer_projection(const TwoPhotonPolState& s, PolBasis setting1, PolBasis setting2) {
    return std::norm(project(s.amplitudes(), basis_vector(setting1), basis_vector(setting2)));
}

} // namespace twophoton
