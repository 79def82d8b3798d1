#pragma once

#include "twophoton/polarization.hpp"
#include "twophoton/transverse.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace twophoton {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2&) const = default;
};

/// Beam-splitter reflection: y -> -y.
constexpr Point2 reflect(Point2 p) { return {p.x, -p.y}; }

/// Two-photon state in front of the beam splitter. The spatial amplitude is
/// the pump at the detection plane evaluated at the sum coordinate,
/// Phi(r1, r2) = W((r1 + r2) / 2), scaled so that the double integral of
/// |Phi|^2 over the sampled window is 1. Rates built from it are therefore
/// detection probabilities per emitted pair.
class BiphotonState {
public:
    BiphotonState(std::shared_ptr<const FieldGrid> pump_at_z, TwoPhotonPolState pol, double delay,
                  double overlap, double pair_wavelength, double filter_bandwidth);

    const FieldGrid& pump() const { return *pump_; }
    const TwoPhotonPolState& pol() const { return pol_; }
    double delay() const { return delay_; }
    double overlap() const { return overlap_; }
    double pair_wavelength() const { return pair_wavelength_; }
    double filter_bandwidth() const { return filter_bandwidth_; }

    /// lambda^2 / delta-lambda of the interference filters.
    double coherence_length() const;

    /// Phi(r1, r2); zero when the sum coordinate leaves the sampled window.
    Complex pair_amplitude(Point2 r1, Point2 r2) const;

    /// Same pump and polarization, different delay.
    BiphotonState with_delay(double delay) const;
    BiphotonState with_overlap(double overlap) const;

private:
    std::shared_ptr<const FieldGrid> pump_;
    TwoPhotonPolState pol_;
    double delay_;
    double overlap_;
    double pair_wavelength_;
    double filter_bandwidth_;
    double scale_;
};

/// Discrete double sum of |W((r1 + r2) / 2)|^2 dA^2 over all ordered pairs of
/// grid samples, evaluated through the sum-coordinate multiplicities.
double pair_norm_squared(const FieldGrid& pump);

BiphotonState make_biphoton(const FieldGrid& pump_at_z, const TwoPhotonPolState& pol, double delay,
                            double overlap, double pair_wavelength = 702e-9,
                            double filter_bandwidth = 1e-9);

/// Detector 1 / detector 2 placement relative to the beam splitter outputs.
/// SourceArms is the beam splitter removed: no exchange path.
enum class PortPair { Same1, Same2, Opposite, SourceArms };

/// One of the two ways the pair can reach (r1, r2): coefficient times
/// Phi evaluated with optional reflections, times pol or SWAP(pol).
struct PathTerm {
    Complex coefficient = 0.0;
    bool reflect1 = false;
    bool reflect2 = false;
    bool swap_pol = false;

    Complex spatial(const BiphotonState& s, Point2 r1, Point2 r2) const;
    PolAmplitudes at(const BiphotonState& s, Point2 r1, Point2 r2) const;
};

struct PortPairAmplitude {
    PortPair pair;
    PathTerm direct;
    PathTerm exchange;
    BiphotonState state;

    PolAmplitudes direct_at(Point2 r1, Point2 r2) const { return direct.at(state, r1, r2); }
    PolAmplitudes exchange_at(Point2 r1, Point2 r2) const { return exchange.at(state, r1, r2); }
    /// D + E: the fully indistinguishable amplitude.
    PolAmplitudes total_at(Point2 r1, Point2 r2) const { return direct_at(r1, r2) + exchange_at(r1, r2); }
};

/// Symmetric 50/50 splitter, t = 1/sqrt2, r = i/sqrt2, reflection flips y.
/// Returns Same1, Same2 and Opposite in that order.
std::vector<PortPairAmplitude> beam_splitter_transform(const BiphotonState& state);

PortPairAmplitude port_pair_amplitude(const BiphotonState& state, PortPair pair);

/// Polarization analyzers in front of detectors 1 and 2; a missing one sums
/// over that photon's polarization outcomes.
struct AnalyzerPair {
    std::optional<Jones> detector1;
    std::optional<Jones> detector2;

    /// P1 (x) P2 with P = a a^dagger, or the identity for a missing analyzer.
    Eigen::Matrix4cd projector() const;
};

/// Integrated or pointwise pieces of |D|^2 + |E|^2 + 2 mu g Re<D|E>.
struct InterferenceTerms {
    double direct = 0.0;
    double exchange = 0.0;
    Complex cross = 0.0;

    /// `coherence` is mu * g(delay), in [0, 1].
    double rate(double coherence) const { return direct + exchange + 2.0 * coherence * cross.real(); }

    InterferenceTerms& operator+=(const InterferenceTerms& o) {
        direct += o.direct;
        exchange += o.exchange;
        cross += o.cross;
        return *this;
    }
};

/// Precomputes the analyzer projections of pol and SWAP(pol) so the terms
/// at many (r1, r2) points cost two interpolations each.
class TermEvaluator {
public:
    TermEvaluator(const PortPairAmplitude& amp, const std::optional<AnalyzerPair>& analyzers);

    InterferenceTerms at(Point2 r1, Point2 r2, double weight = 1.0) const;

private:
    const PortPairAmplitude* amp_;
    double direct_pol_;
    double exchange_pol_;
    Complex cross_pol_;
};

/// Gaussian delay envelope with FWHM equal to the coherence length.
double delay_envelope(double delay, double coherence_length);

double coincidence_density(const PortPairAmplitude& amp, Point2 r1, Point2 r2,
                           const std::optional<AnalyzerPair>& analyzers, double delay, double overlap);

} // namespace twophoton
