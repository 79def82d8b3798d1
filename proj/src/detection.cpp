#include "twophoton/detection.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

namespace twophoton {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

bool is_bs_port(Port p) { return p == Port::Port1 || p == Port::Port2; }

struct Extent {
    double x;
    double y;
};

Extent half_extent(const Aperture& a) {
    if (const auto* c = std::get_if<CircleAperture>(&a)) return {0.5 * c->diameter, 0.5 * c->diameter};
    if (const auto* s = std::get_if<SlitAperture>(&a)) return {0.5 * s->extent_x, 0.5 * s->extent_y};
    return {0.0, 0.0};
}

std::optional<Jones> analyzer_vector(const DetectorSpec& d) {
    if (!d.analyzer) return std::nullopt;
    return d.analyzer->vector();
}

} // namespace

Jones Analyzer::vector() const {
    const double c = std::cos(2.0 * hwp_angle);
    const double s = std::sin(2.0 * hwp_angle);
    return arm == PbsArm::Transmitted ? Jones(c, s) : Jones(s, -c);
}

void DetectorSpec::validate() const {
    if (const auto* c = std::get_if<CircleAperture>(&aperture)) {
        if (!(c->diameter > 0.0)) throw std::invalid_argument("circular aperture diameter must be positive");
    }
    if (const auto* s = std::get_if<SlitAperture>(&aperture)) {
        if (!(s->extent_x > 0.0) || !(s->extent_y > 0.0)) {
            throw std::invalid_argument("slit dimensions must be positive");
        }
    }
    if (analyzer && !(analyzer->hwp_angle >= 0.0 && analyzer->hwp_angle < std::numbers::pi)) {
        throw std::invalid_argument("analyzer half-wave plate angle must lie in [0, pi)");
    }
}

std::vector<QuadraturePoint> aperture_points(const DetectorSpec& d, double step, int min_points) {
    d.validate();
    if (!(step > 0.0)) throw std::invalid_argument("quadrature step must be positive");
    min_points = std::max(min_points, 1);
    std::vector<QuadraturePoint> pts;
    if (std::holds_alternative<PointAperture>(d.aperture)) {
        pts.push_back({d.center, 1.0});
        return pts;
    }
    if (const auto* s = std::get_if<SlitAperture>(&d.aperture)) {
        const int nx = std::max(min_points, static_cast<int>(std::ceil(s->extent_x / step)));
        const int ny = std::max(min_points, static_cast<int>(std::ceil(s->extent_y / step)));
        const double hx = s->extent_x / nx;
        const double hy = s->extent_y / ny;
        pts.reserve(static_cast<std::size_t>(nx) * ny);
        for (int j = 0; j < ny; ++j) {
            const double y = d.center.y - 0.5 * s->extent_y + (j + 0.5) * hy;
            for (int i = 0; i < nx; ++i) {
                pts.push_back({{d.center.x - 0.5 * s->extent_x + (i + 0.5) * hx, y}, hx * hy});
            }
        }
        return pts;
    }
    const auto& c = std::get<CircleAperture>(d.aperture);
    const double radius = 0.5 * c.diameter;
    const int rings = std::max((min_points + 1) / 2, static_cast<int>(std::ceil(radius / step)));
    const double dr = radius / rings;
    for (int i = 0; i < rings; ++i) {
        const double r = (i + 0.5) * dr;
        const int nt = std::max(min_points, static_cast<int>(std::ceil(2.0 * std::numbers::pi * r / step)));
        const double dt = 2.0 * std::numbers::pi / nt;
        for (int k = 0; k < nt; ++k) {
            const double t = (k + 0.5) * dt;
            pts.push_back({{d.center.x + r * std::cos(t), d.center.y + r * std::sin(t)}, r * dr * dt});
        }
    }
    return pts;
}

bool detectors_ambiguous(const DetectorSpec& d1, const DetectorSpec& d2) {
    if (d1.port != d2.port || !is_bs_port(d1.port)) return false;
    if (d1.analyzer || d2.analyzer) return false;
    const Extent a = half_extent(d1.aperture);
    const Extent b = half_extent(d2.aperture);
    return std::abs(d1.center.x - d2.center.x) <= a.x + b.x && std::abs(d1.center.y - d2.center.y) <= a.y + b.y;
}

PortPair port_pair_for(const DetectorSpec& d1, const DetectorSpec& d2) {
    if (is_bs_port(d1.port) != is_bs_port(d2.port)) {
        throw std::invalid_argument("cannot pair a beam-splitter port with a source arm");
    }
    if (!is_bs_port(d1.port)) {
        if (d1.port == d2.port) throw std::invalid_argument("both detectors on the same source arm");
        return PortPair::SourceArms;
    }
    if (d1.port != d2.port) return PortPair::Opposite;
    return d1.port == Port::Port1 ? PortPair::Same1 : PortPair::Same2;
}

InterferenceTerms integrate_terms(const BiphotonState& state, const DetectorSpec& d1_in,
                                  const DetectorSpec& d2_in, const QuadratureOptions& quad) {
    // Opposite and source-arm amplitudes are written for d1 on port 1 / arm A.
    const bool flip = (d1_in.port == Port::Port2 && d2_in.port == Port::Port1) ||
                      (d1_in.port == Port::SourceArmB && d2_in.port == Port::SourceArmA);
    const DetectorSpec& d1 = flip ? d2_in : d1_in;
    const DetectorSpec& d2 = flip ? d1_in : d2_in;

    const PortPairAmplitude amp = port_pair_amplitude(state, port_pair_for(d1, d2));
    std::optional<AnalyzerPair> analyzers;
    if (d1.analyzer || d2.analyzer) analyzers = AnalyzerPair{analyzer_vector(d1), analyzer_vector(d2)};
    const TermEvaluator eval(amp, analyzers);

    const auto& g = state.pump().geometry();
    const double step = quad.step > 0.0 ? quad.step : std::min(g.dx(), g.dy());
    const auto p1 = aperture_points(d1, step, quad.min_points);
    const auto p2 = aperture_points(d2, step, quad.min_points);

    InterferenceTerms total;
    for (const auto& a : p1) {
        InterferenceTerms row;
        for (const auto& b : p2) row += eval.at(a.r, b.r, b.weight);
        row.direct *= a.weight;
        row.exchange *= a.weight;
        row.cross *= a.weight;
        total += row;
    }
    return total;
}

double coincidence_rate(const BiphotonState& state, const DetectorSpec& d1, const DetectorSpec& d2,
                        const QuadratureOptions& quad) {
    if (detectors_ambiguous(d1, d2)) {
        std::clog << "warning: overlapping same-port detectors without analyzers; "
                     "a single photon could trigger either one\n";
    }
    const InterferenceTerms t = integrate_terms(state, d1, d2, quad);
    const double coherence = state.overlap() * delay_envelope(state.delay(), state.coherence_length());
    return std::max(0.0, t.rate(coherence));
}

double poisson_sigma(double rate, double exposure) {
    if (!(exposure > 0.0)) throw std::invalid_argument("exposure must be positive");
    return std::sqrt(std::max(rate, 0.0) * exposure) / exposure;
}

namespace {

const std::vector<double>& values(const ScanResult& c) { return c.sampled.empty() ? c.rates : c.sampled; }

double baseline(const std::vector<double>& v) { return 0.5 * (v.front() + v.back()); }

std::size_t nearest_zero(const std::vector<double>& abscissa) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < abscissa.size(); ++i) {
        if (std::abs(abscissa[i]) < std::abs(abscissa[best])) best = i;
    }
    return best;
}

void finish(ScanResult& r) {
    r.errors.resize(r.rates.size());
    for (std::size_t i = 0; i < r.rates.size(); ++i) r.errors[i] = poisson_sigma(r.rates[i], r.exposure);
    r.visibility = visibility(r);
}

} // namespace

double visibility(const ScanResult& curve) {
    const auto& v = values(curve);
    if (v.empty()) throw std::invalid_argument("visibility of an empty curve");
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double mn = std::max(*lo, 0.0);
    const double mx = std::max(*hi, 0.0);
    if (mx <= 0.0) return 0.0;
    double vis;
    if (curve.kind == ScanKind::Delay) {
        const double b = baseline(v);
        const bool dip = b - mn >= mx - b;
        vis = dip ? (mx - mn) / mx : (mn > 0.0 ? (mx - mn) / mn : 1.0);
    } else {
        vis = (mx - mn) / (mx + mn);
    }
    return std::clamp(vis, 0.0, 1.0);
}

const char* to_string(Classification c) {
    switch (c) {
    case Classification::Dip: return "dip";
    case Classification::Peak: return "peak";
    case Classification::Null: return "null";
    case Classification::Flat: return "flat";
    case Classification::Profile: return "profile";
    }
    return "?";
}

Classification classify(const ScanResult& curve) {
    const auto& v = values(curve);
    if (v.empty()) throw std::invalid_argument("cannot classify an empty curve");
    const double max_counts = std::max(0.0, *std::max_element(v.begin(), v.end())) * curve.exposure;
    if (max_counts <= 3.0 * std::sqrt(max_counts)) return Classification::Null;
    if (curve.kind != ScanKind::Delay) return Classification::Profile;
    const double b = baseline(v);
    const double diff = v[nearest_zero(curve.abscissa)] - b;
    if (std::abs(diff) <= 3.0 * poisson_sigma(b, curve.exposure)) return Classification::Flat;
    return diff < 0.0 ? Classification::Dip : Classification::Peak;
}

ScanResult hom_scan(const BiphotonState& state, const DetectorSpec& d1, const DetectorSpec& d2,
                    double delay_min, double delay_max, int steps, double exposure,
                    const QuadratureOptions& quad) {
    const double lc = state.coherence_length();
    if (steps < 3 || !(delay_max > delay_min)) {
        throw std::invalid_argument(fmt::format("degenerate delay scan: [{:g}, {:g}] m in {} steps", delay_min,
                                                delay_max, steps));
    }
    if (delay_min > -3.0 * lc || delay_max < 3.0 * lc) {
        throw std::invalid_argument(fmt::format(
            "delay scan [{:g}, {:g}] m must span at least +/-3 envelope widths (+/-{:g} m)", delay_min,
            delay_max, 3.0 * lc));
    }
    if (!(exposure > 0.0)) throw std::invalid_argument("exposure must be positive");
    if (detectors_ambiguous(d1, d2)) {
        std::clog << "warning: overlapping same-port detectors without analyzers\n";
    }
    const InterferenceTerms t = integrate_terms(state, d1, d2, quad);

    ScanResult r;
    r.kind = ScanKind::Delay;
    r.exposure = exposure;
    for (int i = 0; i < steps; ++i) {
        const double delay = delay_min + (delay_max - delay_min) * i / (steps - 1);
        const double coherence = state.overlap() * delay_envelope(delay, lc);
        r.abscissa.push_back(delay * 1e3);
        r.rates.push_back(std::max(0.0, t.rate(coherence)));
    }
    finish(r);
    return r;
}

ScanResult transverse_scan(const BiphotonState& state, const DetectorSpec& d1, const DetectorSpec& d2,
                           TransverseMode mode, double y_min, double y_max, int steps, double exposure,
                           const QuadratureOptions& quad) {
    auto scannable = [](const DetectorSpec& d) {
        return std::holds_alternative<SlitAperture>(d.aperture) || std::holds_alternative<PointAperture>(d.aperture);
    };
    if (!scannable(d1) || !scannable(d2)) throw std::invalid_argument("transverse scans need slit or point detectors");
    if (d1.port != d2.port || !is_bs_port(d1.port)) {
        throw std::invalid_argument("transverse scans need both detectors on the same beam-splitter output");
    }
    if (steps < 2 || !(y_max > y_min)) throw std::invalid_argument("degenerate transverse scan range");
    if (!(exposure > 0.0)) throw std::invalid_argument("exposure must be positive");

    ScanResult r;
    r.kind = ScanKind::Transverse;
    r.exposure = exposure;
    for (int i = 0; i < steps; ++i) {
        const double y = y_min + (y_max - y_min) * i / (steps - 1);
        DetectorSpec a = d1;
        DetectorSpec b = d2;
        b.center.y = y;
        if (mode == TransverseMode::ScanTogether) a.center.y = y;
        r.abscissa.push_back(y * 1e3);
        r.rates.push_back(coincidence_rate(state, a, b, quad));
    }
    finish(r);
    return r;
}

ScanResult polarization_correlation_scan(const TwoPhotonPolState& pol, double fixed_angle_deg,
                                         double angle_min_deg, double angle_max_deg, int steps, double mu,
                                         double exposure) {
    if (steps < 2 || !(angle_max_deg > angle_min_deg)) throw std::invalid_argument("degenerate angle scan range");
    if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("mode overlap must lie in [0, 1]");
    if (!(exposure > 0.0)) throw std::invalid_argument("exposure must be positive");
    const Jones fixed(std::cos(fixed_angle_deg * kDeg), std::sin(fixed_angle_deg * kDeg));
    ScanResult r;
    r.kind = ScanKind::Angle;
    r.exposure = exposure;
    for (int i = 0; i < steps; ++i) {
        const double deg = angle_min_deg + (angle_max_deg - angle_min_deg) * i / (steps - 1);
        const Jones rotating(std::cos(deg * kDeg), std::sin(deg * kDeg));
        const double pure = std::norm(project(pol.amplitudes(), fixed, rotating));
        r.abscissa.push_back(deg);
        r.rates.push_back(mu * pure + (1.0 - mu) * 0.25);
    }
    finish(r);
    return r;
}

void apply_poisson_noise(ScanResult& curve, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    curve.sampled.clear();
    for (double rate : curve.rates) {
        const double mean = rate * curve.exposure;
        double counts = 0.0;
        if (mean > 0.0) counts = static_cast<double>(std::poisson_distribution<long long>(mean)(rng));
        curve.sampled.push_back(counts / curve.exposure);
    }
    curve.visibility = visibility(curve);
}

void write_scan_csv(const ScanResult& curve, std::ostream& out) {
    const auto& v = values(curve);
    out << "abscissa,rate,sigma\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
        out << fmt::format("{:.10g},{:.12e},{:.12e}\n", curve.abscissa[i], v[i], curve.errors[i]);
    }
    out << fmt::format("# visibility={:.6f}\n", curve.visibility);
}

} // namespace twophoton
