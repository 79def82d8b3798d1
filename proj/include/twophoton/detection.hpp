#pragma once

#include "twophoton/biphoton.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace twophoton {

enum class Port { Port1, Port2, SourceArmA, SourceArmB };

struct CircleAperture {
    double diameter;
};

/// Rectangular slit; the vertical slits used for transverse scans are narrow along y.
struct SlitAperture {
    double extent_x;
    double extent_y;
};

/// Ideal point detector: rates become densities at the center.
struct PointAperture {};

using Aperture = std::variant<CircleAperture, SlitAperture, PointAperture>;

enum class PbsArm { Transmitted, Reflected };

/// Half-wave plate followed by a polarizing beam splitter. The transmitted
/// arm passes (cos 2a, sin 2a), the reflected arm (sin 2a, -cos 2a).
struct Analyzer {
    double hwp_angle = 0.0;
    PbsArm arm = PbsArm::Transmitted;

    Jones vector() const;
};

struct DetectorSpec {
    Port port = Port::Port1;
    Point2 center;
    Aperture aperture = CircleAperture{3e-3};
    std::optional<Analyzer> analyzer;

    void validate() const;
};

struct QuadratureOptions {
    /// Target spacing of midpoint cells; <= 0 selects the pump grid spacing.
    double step = 0.0;
    /// Minimum cells across any aperture dimension.
    int min_points = 16;
};

struct QuadraturePoint {
    Point2 r;
    double weight;
};

/// Midpoint cells covering the aperture. Slits use a rectangular lattice,
/// circles a polar one (rings of equal radial width), so the weights sum to
/// the exact aperture area.
std::vector<QuadraturePoint> aperture_points(const DetectorSpec& d, double step, int min_points);

/// Both detectors behind the same port with no analyzer and overlapping
/// apertures: one photon could fire either detector.
bool detectors_ambiguous(const DetectorSpec& d1, const DetectorSpec& d2);

PortPair port_pair_for(const DetectorSpec& d1, const DetectorSpec& d2);

/// Aperture-integrated |D|^2, |E|^2 and <D|E>; independent of delay and overlap.
InterferenceTerms integrate_terms(const BiphotonState& state, const DetectorSpec& d1, const DetectorSpec& d2,
                                  const QuadratureOptions& quad = {});

double coincidence_rate(const BiphotonState& state, const DetectorSpec& d1, const DetectorSpec& d2,
                        const QuadratureOptions& quad = {});

enum class ScanKind { Delay, Transverse, Angle };

/// Abscissa units: delay in mm, detector y in mm, analyzer angle in degrees.
struct ScanResult {
    ScanKind kind = ScanKind::Delay;
    std::vector<double> abscissa;
    std::vector<double> rates;
    std::vector<double> errors;
    /// Poisson-sampled rates (counts / exposure); empty unless noise was requested.
    std::vector<double> sampled;
    double exposure = 1.0;
    double visibility = 0.0;
};

/// Counts per unit rate. sigma = sqrt(rate * exposure) / exposure.
double poisson_sigma(double rate, double exposure);

/// Delay scans: contrast against the flat wings, (max - min) / max for a dip
/// and (max - min) / min for a peak. Other scans: (max - min) / (max + min).
/// All-zero curves give 0.
double visibility(const ScanResult& curve);

enum class Classification { Dip, Peak, Null, Flat, Profile };

const char* to_string(Classification c);

/// Null when the largest expected count is within 3 sigma of zero. Delay
/// scans are a dip or peak when |rate(0) - baseline| exceeds 3 sigma at the
/// baseline (mean of the two end points), otherwise flat. Other scans: profile.
Classification classify(const ScanResult& curve);

ScanResult hom_scan(const BiphotonState& state, const DetectorSpec& d1, const DetectorSpec& d2,
                    double delay_min, double delay_max, int steps, double exposure,
                    const QuadratureOptions& quad = {});

enum class TransverseMode { FixD1ScanD2, ScanTogether };

/// Scans detector y centers at the state's delay. FixD1ScanD2 keeps d1 where
/// it is and moves d2; ScanTogether moves both to the same y. Abscissa is
/// d2's y.
ScanResult transverse_scan(const BiphotonState& state, const DetectorSpec& d1, const DetectorSpec& d2,
                           TransverseMode mode, double y_min, double y_max, int steps, double exposure,
                           const QuadratureOptions& quad = {});

/// Beam splitter removed; polarizer 1 fixed, polarizer 2 rotated. The
/// source state is mixed with white noise: rho = mu |pol><pol| + (1 - mu) I / 4.
ScanResult polarization_correlation_scan(const TwoPhotonPolState& pol, double fixed_angle_deg,
                                         double angle_min_deg, double angle_max_deg, int steps, double mu,
                                         double exposure);

/// Replaces `sampled` with Poisson draws of rate * exposure, divided back by exposure.
void apply_poisson_noise(ScanResult& curve, std::uint64_t seed);

/// Header "abscissa,rate,sigma", one row per step, then "# visibility=<v>".
void write_scan_csv(const ScanResult& curve, std::ostream& out);

} // namespace twophoton
