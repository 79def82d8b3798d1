#include "twophoton/bench.hpp"

#include <fmt/format.h>

#include <fstream>
#include <memory>
#include <numbers>

namespace twophoton {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct ScenarioDefaults {
    std::vector<BellKind> bells;
    std::optional<PumpKind> pump;
};

ScenarioDefaults defaults_for(Scenario s) {
    switch (s) {
    case Scenario::HomEvenDip: return {{BellKind::PsiPlus}, PumpKind::Gaussian};
    case Scenario::HomOddSinglet: return {{BellKind::PsiMinus}, std::nullopt};
    case Scenario::SameportHv:
    case Scenario::SameportPm: return {{BellKind::PsiMinus, BellKind::PsiPlus}, std::nullopt};
    case Scenario::AntibunchFixed:
    case Scenario::AntibunchTogether:
    case Scenario::PolarizationTest: return {{BellKind::PsiMinus}, std::nullopt};
    }
    return {};
}

struct Resolved {
    std::vector<BellKind> bells;
    std::vector<double> mu;
    PumpKind pump_kind = PumpKind::PhaseStep;
};

Resolved resolve(const BenchConfig& c, Scenario s) {
    const auto def = defaults_for(s);
    Resolved r;
    r.bells = def.bells;
    std::vector<double> mu;
    std::optional<PumpKind> pump = def.pump;
    if (const auto it = c.scenarios.find(s); it != c.scenarios.end()) {
        if (!it->second.bells.empty()) r.bells = it->second.bells;
        mu = it->second.mu;
        if (it->second.pump) pump = it->second.pump;
    }
    if (mu.empty()) mu = {c.state.mu};
    if (mu.size() == 1) mu.assign(r.bells.size(), mu.front());
    if (mu.size() != r.bells.size()) {
        throw ConfigError(0, "mu", fmt::format("[scenario.{}] needs one mu or one per Bell state", to_string(s)));
    }
    r.mu = mu;
    if (c.pump) r.pump_kind = pump.value_or(c.pump->kind);
    return r;
}

FieldGrid pump_at_detectors(const BenchConfig& c, PumpKind kind) {
    const auto& p = *c.pump;
    PumpSpec spec;
    spec.wavelength = p.wavelength;
    switch (kind) {
    case PumpKind::Gaussian: spec.kind = GaussianPump{p.waist}; break;
    case PumpKind::HermiteGauss: spec.kind = HermiteGaussPump{p.hg_m, p.hg_n, p.waist}; break;
    case PumpKind::PhaseStep: spec.kind = PhaseStepPump{p.waist, p.step_phase, p.transmission}; break;
    }
    GridGeometry g{c.grid.samples, c.grid.samples, c.grid.window, c.grid.window};
    return fresnel_propagate(synthesize_pump(spec, g), p.distance);
}

DetectorSpec circle(const BenchConfig& c, Port port, std::optional<Analyzer> an) {
    DetectorSpec d;
    d.port = port;
    d.aperture = CircleAperture{c.detectors.circle_diameter};
    d.analyzer = an;
    return d;
}

DetectorSpec antibunch_detector(const BenchConfig& c, double y, PbsArm arm) {
    DetectorSpec d;
    d.port = Port::Port1;
    d.center = {0.0, y};
    if (c.detectors.antibunch_aperture == AntibunchAperture::Slit) {
        d.aperture = SlitAperture{c.detectors.slit_x, c.detectors.slit_y};
    } else {
        d.aperture = PointAperture{};
    }
    d.analyzer = Analyzer{0.0, arm};
    return d;
}

ScanEntry entry(std::string label, ScanResult scan, const BenchConfig& c, std::uint64_t seed) {
    if (c.output.noise) apply_poisson_noise(scan, seed);
    const auto cls = classify(scan);
    return ScanEntry{std::move(label), std::move(scan), cls};
}

} // namespace

ScenarioReport run_scenario(const BenchConfig& config, Scenario scenario) {
    const std::string name(to_string(scenario));
    ScenarioReport report;
    report.name = name;
    report.digest = sha256_hex(render(config) + "\nscenario = " + name + "\n");

    const Resolved r = resolve(config, scenario);
    const double exposure = config.output.exposure;
    // Per-scan seeds: distinct across scenarios and labels, fixed for a given config.
    const std::uint64_t base_seed = config.output.seed * 1000003ULL + static_cast<std::uint64_t>(scenario) * 101ULL;
    std::uint64_t scan_index = 0;

    if (scenario == Scenario::PolarizationTest) {
        for (std::size_t i = 0; i < r.bells.size(); ++i) {
            for (double fixed : config.scan.fixed_angles) {
                auto scan = polarization_correlation_scan(bell_state(r.bells[i]), fixed, 0.0, 180.0,
                                                          config.scan.angle_steps, r.mu[i], exposure);
                report.scans.push_back(entry(fmt::format("{}_fixed{:g}", to_string(r.bells[i]), fixed),
                                             std::move(scan), config, base_seed + scan_index++));
            }
        }
        return report;
    }

    if (!config.pump) {
        throw ConfigError(0, "", fmt::format("scenario '{}' requires a [pump] section (kind, waist)", name));
    }
    const auto pump = std::make_shared<const FieldGrid>(pump_at_detectors(config, r.pump_kind));
    QuadratureOptions quad;
    if (config.grid.quadrature_step) quad.step = *config.grid.quadrature_step;

    for (std::size_t i = 0; i < r.bells.size(); ++i) {
        const BiphotonState state(pump, bell_state(r.bells[i]), 0.0, r.mu[i], config.state.pair_wavelength,
                                  config.state.filter_bandwidth);
        const std::string label = to_string(r.bells[i]);
        const double dmax = config.scan.delay_max;
        const int dsteps = config.scan.delay_steps;
        ScanResult scan;
        switch (scenario) {
        case Scenario::HomEvenDip:
        case Scenario::HomOddSinglet:
            scan = hom_scan(state, circle(config, Port::Port1, std::nullopt), circle(config, Port::Port2, std::nullopt),
                            -dmax, dmax, dsteps, exposure, quad);
            break;
        case Scenario::SameportHv:
        case Scenario::SameportPm: {
            const double angle = scenario == Scenario::SameportHv ? 0.0 : 22.5 * kDeg;
            scan = hom_scan(state, circle(config, Port::Port1, Analyzer{angle, PbsArm::Transmitted}),
                            circle(config, Port::Port1, Analyzer{angle, PbsArm::Reflected}), -dmax, dmax, dsteps,
                            exposure, quad);
            break;
        }
        case Scenario::AntibunchFixed:
        case Scenario::AntibunchTogether: {
            const double fixed = config.detectors.fixed_y;
            const auto mode = scenario == Scenario::AntibunchFixed ? TransverseMode::FixD1ScanD2
                                                                   : TransverseMode::ScanTogether;
            const double t = config.scan.transverse_max;
            scan = transverse_scan(state, antibunch_detector(config, fixed, PbsArm::Transmitted),
                                   antibunch_detector(config, fixed, PbsArm::Reflected), mode, fixed - t, fixed + t,
                                   config.scan.transverse_steps, exposure, quad);
            break;
        }
        case Scenario::PolarizationTest: break;
        }
        report.scans.push_back(entry(label, std::move(scan), config, base_seed + scan_index++));
    }
    return report;
}

std::vector<std::filesystem::path> write_outputs(const std::vector<ScenarioReport>& reports,
                                                 const std::filesystem::path& directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) throw std::runtime_error(fmt::format("cannot create '{}': {}", directory.string(), ec.message()));

    std::vector<std::filesystem::path> paths;
    auto open = [](const std::filesystem::path& p) {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", p.string()));
        return out;
    };
    std::string summary = "scenario,scan,visibility,classification,digest\n";
    for (const auto& rep : reports) {
        for (const auto& e : rep.scans) {
            const auto path = directory / fmt::format("{}_{}.csv", rep.name, e.label);
            auto out = open(path);
            write_scan_csv(e.scan, out);
            if (!out.flush()) throw std::runtime_error(fmt::format("write failed for '{}'", path.string()));
            paths.push_back(path);
            summary += fmt::format("{},{},{:.6f},{},{}\n", rep.name, e.label, e.scan.visibility,
                                   to_string(e.classification), rep.digest);
        }
    }
    const auto spath = directory / "summary.txt";
    auto out = open(spath);
    out << summary;
    if (!out.flush()) throw std::runtime_error(fmt::format("write failed for '{}'", spath.string()));
    paths.push_back(spath);
    return paths;
}

} // namespace twophoton
