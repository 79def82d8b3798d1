#pragma once

#include <Eigen/Dense>

#include <complex>
#include <utility>

namespace twophoton {

using Complex = std::complex<double>;
using Jones = Eigen::Vector2cd;
using PolAmplitudes = Eigen::Vector4cd;

/// Single-photon analyzer basis vectors. Plus = (H+V)/sqrt2, Minus = (H-V)/sqrt2.
enum class PolBasis { H, V, Plus, Minus };

enum class BellKind { PsiMinus, PsiPlus, PhiMinus, PhiPlus };

enum class RetarderKind { Half, Quarter };

Jones basis_vector(PolBasis b);

const char* to_string(BellKind kind);

/// Two-photon polarization amplitudes, indexed (HH, HV, VH, VV).
/// The first letter is photon 1, the second photon 2.
class TwoPhotonPolState {
public:
    static constexpr double kNormTolerance = 1e-12;

    /// Throws std::invalid_argument unless the squared norm is 1 within kNormTolerance.
    explicit TwoPhotonPolState(const PolAmplitudes& amplitudes);

    /// Normalizes an arbitrary nonzero vector.
    static TwoPhotonPolState normalized(const PolAmplitudes& amplitudes);

    static TwoPhotonPolState product(const Jones& photon1, const Jones& photon2);

    const PolAmplitudes& amplitudes() const { return amplitudes_; }
    Complex operator[](int i) const { return amplitudes_[i]; }

    /// Exchanges the photon labels: HV <-> VH.
    TwoPhotonPolState swapped() const;

    bool operator==(const TwoPhotonPolState&) const = default;

private:
    PolAmplitudes amplitudes_;
};

PolAmplitudes swap_photons(const PolAmplitudes& amplitudes);

/// |<a|b>|^2 for normalized states. States are only ever compared this way,
/// since collective operations act up to a global phase.
double fidelity(const TwoPhotonPolState& a, const TwoPhotonPolState& b);

class LocalUnitary {
public:
    static constexpr double kUnitarityTolerance = 1e-12;

    /// Throws std::invalid_argument if U^dagger U deviates from I by more than kUnitarityTolerance.
    explicit LocalUnitary(const Eigen::Matrix2cd& matrix);

    static LocalUnitary identity();

    const Eigen::Matrix2cd& matrix() const { return matrix_; }

    Jones operator*(const Jones& v) const { return matrix_ * v; }

private:
    Eigen::Matrix2cd matrix_;
};

TwoPhotonPolState bell_state(BellKind kind);

/// (U1 (x) U2) s.
TwoPhotonPolState apply_two_qubit(const LocalUnitary& u1, const LocalUnitary& u2,
                                  const TwoPhotonPolState& s);

/// Retarder with its fast axis at `fast_axis_angle` (radians) from H; the
/// retardance (pi or pi/2) is applied to the slow axis.
LocalUnitary wave_plate(RetarderKind kind, double fast_axis_angle);

struct ExchangeParts {
    PolAmplitudes symmetric;
    PolAmplitudes antisymmetric;
};

/// Splits s into its exchange-symmetric and antisymmetric parts. The
/// antisymmetric part is always proportional to psi-minus.
ExchangeParts exchange_projections(const TwoPhotonPolState& s);

/// |<a1, a2|s>|^2.
double analyzer_projection(const TwoPhotonPolState& s, PolBasis setting1, PolBasis setting2);

/// <a1, a2|s> for arbitrary single-photon analyzer vectors.
Complex project(const PolAmplitudes& s, const Jones& a1, const Jones& a2);

} // namespace twophoton
