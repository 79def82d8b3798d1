#pragma once

#include "twophoton/detection.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace twophoton {

/// Parse or validation failure. `line` is 0 when the problem is not tied to
/// one line (e.g. a missing required key).
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, std::string key, const std::string& message);
    int line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    int line_;
    std::string key_;
};

enum class PumpKind { Gaussian, HermiteGauss, PhaseStep };

struct PumpSection {
    PumpKind kind = PumpKind::PhaseStep;
    double waist = 1e-3;
    double step_phase = 3.141592653589793;
    double transmission = 1.0;
    double wavelength = 351e-9;
    double distance = 3.0;
    int hg_m = 0;
    int hg_n = 1;
    bool operator==(const PumpSection&) const = default;
};

struct StateSection {
    double mu = 1.0;
    double pair_wavelength = 702e-9;
    double filter_bandwidth = 1e-9;
    bool operator==(const StateSection&) const = default;
};

struct GridSection {
    int samples = 256;
    double window = 20e-3;
    /// Aperture quadrature spacing; unset means the grid spacing.
    std::optional<double> quadrature_step;
    bool operator==(const GridSection&) const = default;
};

enum class AntibunchAperture { Slit, Point };

struct DetectorsSection {
    double circle_diameter = 3e-3;
    double slit_x = 3e-3;
    double slit_y = 0.3e-3;
    AntibunchAperture antibunch_aperture = AntibunchAperture::Slit;
    double fixed_y = 0.0;
    bool operator==(const DetectorsSection&) const = default;
};

struct ScanSection {
    /// Delay scans run over [-delay_max, delay_max].
    double delay_max = 2e-3;
    int delay_steps = 81;
    /// Transverse scans run over [-transverse_max, transverse_max].
    double transverse_max = 1.5e-3;
    int transverse_steps = 61;
    int angle_steps = 73;
    std::vector<double> fixed_angles = {0.0, 45.0};
    bool operator==(const ScanSection&) const = default;
};

struct OutputSection {
    std::string directory = "out";
    double exposure = 1e8;
    std::uint64_t seed = 1;
    bool noise = false;
    bool operator==(const OutputSection&) const = default;
};

enum class Scenario {
    HomEvenDip,
    HomOddSinglet,
    SameportHv,
    SameportPm,
    AntibunchFixed,
    AntibunchTogether,
    PolarizationTest,
};

const std::vector<Scenario>& all_scenarios();
std::string_view to_string(Scenario s);
/// Throws std::invalid_argument listing the valid names.
Scenario parse_scenario(std::string_view name);

struct ScenarioSection {
    std::vector<BellKind> bells;
    /// One value for all bells, or one per bell.
    std::vector<double> mu;
    std::optional<PumpKind> pump;
    bool operator==(const ScenarioSection&) const = default;
};

struct BenchConfig {
    std::optional<PumpSection> pump;
    StateSection state;
    GridSection grid;
    DetectorsSection detectors;
    ScanSection scan;
    OutputSection output;
    std::map<Scenario, ScenarioSection> scenarios;
    bool operator==(const BenchConfig&) const = default;
};

BenchConfig parse_config(std::string_view text);
BenchConfig load_config(const std::filesystem::path& path);
/// Canonical text form; parse_config(render(c)) == c.
std::string render(const BenchConfig& config);
/// Hex SHA-256 of `text`.
std::string sha256_hex(std::string_view text);

struct ScanEntry {
    std::string label;
    ScanResult scan;
    Classification classification = Classification::Profile;
};

struct ScenarioReport {
    std::string name;
    std::vector<ScanEntry> scans;
    /// Hash of the rendered config and scenario name.
    std::string digest;
};

/// Builds the pump, state and detectors the scenario calls for and runs its
/// scans. Throws ConfigError when a required section is missing.
ScenarioReport run_scenario(const BenchConfig& config, Scenario scenario);

/// Writes <scenario>_<label>.csv per scan plus summary.txt; returns the paths.
std::vector<std::filesystem::path> write_outputs(const std::vector<ScenarioReport>& reports,
                                                 const std::filesystem::path& directory);

} // namespace twophoton
