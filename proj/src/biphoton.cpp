#include "twophoton/biphoton.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace twophoton {

namespace {

const Complex kT{1.0 / std::numbers::sqrt2, 0.0};
const Complex kR{0.0, 1.0 / std::numbers::sqrt2};

} // namespace

double pair_norm_squared(const FieldGrid& pump) {
    const auto& g = pump.geometry();
    const double x0 = g.x(0);
    const double y0 = g.y(0);
    double acc = 0.0;
    for (int sy = 0; sy <= 2 * g.ny - 2; ++sy) {
        const double my = std::min(sy + 1, 2 * g.ny - 1 - sy);
        const double y = y0 + 0.5 * sy * g.dy();
        double row = 0.0;
        for (int sx = 0; sx <= 2 * g.nx - 2; ++sx) {
            const double mx = std::min(sx + 1, 2 * g.nx - 1 - sx);
            row += mx * std::norm(pump.interpolate(x0 + 0.5 * sx * g.dx(), y));
        }
        acc += my * row;
    }
    const double da = g.dx() * g.dy();
    return acc * da * da;
}

BiphotonState::BiphotonState(std::shared_ptr<const FieldGrid> pump_at_z, TwoPhotonPolState pol, double delay,
                             double overlap, double pair_wavelength, double filter_bandwidth)
    : pump_(std::move(pump_at_z)),
      pol_(std::move(pol)),
      delay_(delay),
      overlap_(overlap),
      pair_wavelength_(pair_wavelength),
      filter_bandwidth_(filter_bandwidth) {
    if (!pump_) throw std::invalid_argument("biphoton state needs a pump field");
    if (!(overlap_ >= 0.0 && overlap_ <= 1.0)) throw std::invalid_argument("mode overlap must lie in [0, 1]");
    if (!std::isfinite(delay_)) throw std::invalid_argument("delay must be finite");
    if (!(pair_wavelength_ > 0.0) || !(filter_bandwidth_ > 0.0)) {
        throw std::invalid_argument("pair wavelength and filter bandwidth must be positive");
    }
    const double n2 = pair_norm_squared(*pump_);
    if (!(n2 > 0.0) || !std::isfinite(n2)) throw std::invalid_argument("pump has no two-photon weight");
    scale_ = 1.0 / std::sqrt(n2);
}

double BiphotonState::coherence_length() const {
    return pair_wavelength_ * pair_wavelength_ / filter_bandwidth_;
}

Complex BiphotonState::pair_amplitude(Point2 r1, Point2 r2) const {
    return scale_ * pump_->interpolate(0.5 * (r1.x + r2.x), 0.5 * (r1.y + r2.y));
}

BiphotonState BiphotonState::with_delay(double delay) const {
    BiphotonState s = *this;
    if (!std::isfinite(delay)) throw std::invalid_argument("delay must be finite");
    s.delay_ = delay;
    return s;
}

BiphotonState BiphotonState::with_overlap(double overlap) const {
    if (!(overlap >= 0.0 && overlap <= 1.0)) throw std::invalid_argument("mode overlap must lie in [0, 1]");
    BiphotonState s = *this;
    s.overlap_ = overlap;
    return s;
}

BiphotonState make_biphoton(const FieldGrid& pump_at_z, const TwoPhotonPolState& pol, double delay,
                            double overlap, double pair_wavelength, double filter_bandwidth) {
    return BiphotonState(std::make_shared<const FieldGrid>(pump_at_z), pol, delay, overlap, pair_wavelength,
                         filter_bandwidth);
}

Complex PathTerm::spatial(const BiphotonState& s, Point2 r1, Point2 r2) const {
    return coefficient * s.pair_amplitude(reflect1 ? reflect(r1) : r1, reflect2 ? reflect(r2) : r2);
}

PolAmplitudes PathTerm::at(const BiphotonState& s, Point2 r1, Point2 r2) const {
    if (coefficient == 0.0) return PolAmplitudes::Zero();
    const PolAmplitudes& p = s.pol().amplitudes();
    return spatial(s, r1, r2) * (swap_pol ? swap_photons(p) : p);
}

PortPairAmplitude port_pair_amplitude(const BiphotonState& state, PortPair pair) {
    // Photon a (first polarization index) enters port a, photon b port b.
    // Port 1 receives a transmitted and b reflected; port 2 the reverse.
    switch (pair) {
    case PortPair::Same1:
        // D1 <- a (t), D2 <- b (r); exchange: D1 <- b (r), D2 <- a (t).
        return {pair, {kT * kR, false, true, false}, {kR * kT, true, false, true}, state};
    case PortPair::Same2:
        // D1 <- a (r), D2 <- b (t); exchange: D1 <- b (t), D2 <- a (r).
        return {pair, {kR * kT, true, false, false}, {kT * kR, false, true, true}, state};
    case PortPair::Opposite:
        // D1 in port 1, D2 in port 2.
        return {pair, {kT * kT, false, false, false}, {kR * kR, true, true, true}, state};
    case PortPair::SourceArms:
        return {pair, {1.0, false, false, false}, {0.0, false, false, false}, state};
    }
    throw std::invalid_argument("unknown port pair");
}

std::vector<PortPairAmplitude> beam_splitter_transform(const BiphotonState& state) {
    return {port_pair_amplitude(state, PortPair::Same1), port_pair_amplitude(state, PortPair::Same2),
            port_pair_amplitude(state, PortPair::Opposite)};
}

Eigen::Matrix4cd AnalyzerPair::projector() const {
    auto single = [](const std::optional<Jones>& a) -> Eigen::Matrix2cd {
        if (!a) return Eigen::Matrix2cd::Identity();
        return (*a) * a->adjoint();
    };
    const Eigen::Matrix2cd p1 = single(detector1);
    const Eigen::Matrix2cd p2 = single(detector2);
    Eigen::Matrix4cd k;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            k.block<2, 2>(2 * i, 2 * j) = p1(i, j) * p2;
    return k;
}

TermEvaluator::TermEvaluator(const PortPairAmplitude& amp, const std::optional<AnalyzerPair>& analyzers)
    : amp_(&amp) {
    const PolAmplitudes& p = amp.state.pol().amplitudes();
    const PolAmplitudes pd = amp.direct.swap_pol ? swap_photons(p) : p;
    const PolAmplitudes pe = amp.exchange.swap_pol ? swap_photons(p) : p;
    const Eigen::Matrix4cd m = analyzers ? analyzers->projector() : Eigen::Matrix4cd::Identity();
    direct_pol_ = pd.dot(m * pd).real();
    exchange_pol_ = pe.dot(m * pe).real();
    cross_pol_ = pd.dot(m * pe);
}

InterferenceTerms TermEvaluator::at(Point2 r1, Point2 r2, double weight) const {
    const BiphotonState& s = amp_->state;
    const Complex a = amp_->direct.spatial(s, r1, r2);
    if (amp_->exchange.coefficient == 0.0) return {weight * std::norm(a) * direct_pol_, 0.0, 0.0};
    const Complex b = amp_->exchange.spatial(s, r1, r2);
    return {weight * std::norm(a) * direct_pol_, weight * std::norm(b) * exchange_pol_,
            weight * std::conj(a) * b * cross_pol_};
}

double delay_envelope(double delay, double coherence_length) {
    if (!(coherence_length > 0.0)) throw std::invalid_argument("coherence length must be positive");
    const double u = delay / coherence_length;
    return std::exp(-4.0 * std::numbers::ln2 * u * u);
}

double coincidence_density(const PortPairAmplitude& amp, Point2 r1, Point2 r2,
                           const std::optional<AnalyzerPair>& analyzers, double delay, double overlap) {
    if (!(overlap >= 0.0 && overlap <= 1.0)) throw std::invalid_argument("mode overlap must lie in [0, 1]");
    const double coherence = overlap * delay_envelope(delay, amp.state.coherence_length());
    // Cauchy-Schwarz keeps this >= 0 up to rounding; clamp the rounding.
    return std::max(0.0, TermEvaluator(amp, analyzers).at(r1, r2).rate(coherence));
}

} // namespace twophoton
