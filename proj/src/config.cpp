#include "twophoton/bench.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace twophoton {

ConfigError::ConfigError(int line, std::string key, const std::string& message)
    : std::runtime_error(line > 0 ? (key.empty() ? fmt::format("line {}: {}", line, message)
                                                 : fmt::format("line {}: key '{}': {}", line, key, message))
                                  : (key.empty() ? message : fmt::format("key '{}': {}", key, message))),
      line_(line), key_(std::move(key)) {}

namespace {

constexpr std::pair<Scenario, std::string_view> kScenarioNames[] = {
    {Scenario::HomEvenDip, "hom_even_dip"},
    {Scenario::HomOddSinglet, "hom_odd_singlet"},
    {Scenario::SameportHv, "sameport_hv"},
    {Scenario::SameportPm, "sameport_pm"},
    {Scenario::AntibunchFixed, "antibunch_fixed"},
    {Scenario::AntibunchTogether, "antibunch_together"},
    {Scenario::PolarizationTest, "polarization_test"},
};

constexpr std::pair<PumpKind, std::string_view> kPumpNames[] = {
    {PumpKind::Gaussian, "gaussian"},
    {PumpKind::HermiteGauss, "hermite_gauss"},
    {PumpKind::PhaseStep, "phase_step"},
};

constexpr BellKind kBells[] = {BellKind::PsiMinus, BellKind::PsiPlus, BellKind::PhiMinus, BellKind::PhiPlus};

std::string_view pump_name(PumpKind k) {
    for (const auto& [kind, name] : kPumpNames)
        if (kind == k) return name;
    return "?";
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

/// Current line and key, so value parsers can raise located errors.
struct Where {
    int line;
    std::string key;
    [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(line, key, msg); }
};

double number_prefix(const std::string& v, const Where& w, std::string& rest) {
    if (v.empty()) w.fail("missing value");
    const char* begin = v.c_str();
    char* end = nullptr;
    errno = 0;
    const double x = std::strtod(begin, &end);
    if (end == begin || errno == ERANGE || !std::isfinite(x)) w.fail(fmt::format("'{}' is not a number", v));
    rest = trim(std::string_view(end));
    return x;
}

double parse_plain(const std::string& v, const Where& w) {
    std::string rest;
    const double x = number_prefix(v, w, rest);
    if (!rest.empty()) w.fail(fmt::format("unexpected '{}' after number (this key takes no unit)", rest));
    return x;
}

double parse_length(const std::string& v, const Where& w) {
    std::string unit;
    const double x = number_prefix(v, w, unit);
    if (unit.empty() || unit == "m") return x;
    if (unit == "mm") return x * 1e-3;
    if (unit == "um") return x * 1e-6;
    if (unit == "nm") return x * 1e-9;
    w.fail(fmt::format("unknown length unit '{}' (use m, mm, um or nm)", unit));
}

double positive_length(const std::string& v, const Where& w) {
    const double x = parse_length(v, w);
    if (!(x > 0.0)) w.fail(fmt::format("must be a positive length, got {}", v));
    return x;
}

long long parse_integer(const std::string& v, const Where& w, long long min_value) {
    char* end = nullptr;
    errno = 0;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || *end != '\0' || errno == ERANGE) w.fail(fmt::format("'{}' is not an integer", v));
    if (x < min_value) w.fail(fmt::format("must be at least {}, got {}", min_value, x));
    return x;
}

double unit_interval(const std::string& v, const Where& w) {
    const double x = parse_plain(v, w);
    if (!(x >= 0.0 && x <= 1.0)) w.fail(fmt::format("must lie in [0, 1], got {}", v));
    return x;
}

bool parse_bool(const std::string& v, const Where& w) {
    if (v == "true") return true;
    if (v == "false") return false;
    w.fail(fmt::format("expected true or false, got '{}'", v));
}

PumpKind parse_pump_kind(const std::string& v, const Where& w) {
    for (const auto& [kind, name] : kPumpNames)
        if (name == v) return kind;
    w.fail(fmt::format("unknown pump kind '{}' (gaussian, hermite_gauss, phase_step)", v));
}

BellKind parse_bell(const std::string& v, const Where& w) {
    for (auto b : kBells)
        if (to_string(b) == v) return b;
    w.fail(fmt::format("unknown Bell state '{}' (psi_minus, psi_plus, phi_minus, phi_plus)", v));
}

using Handler = std::function<void(const std::string& value, const Where& w)>;

struct SectionParser {
    std::map<std::string, Handler> handlers;
    std::set<std::string> required;
    std::set<std::string> seen;
};

std::string fmt_double(double x) { return fmt::format("{:.17g}", x); }
std::string fmt_length(double x) { return fmt::format("{:.17g} m", x); }

} // namespace

const std::vector<Scenario>& all_scenarios() {
    static const std::vector<Scenario> v = [] {
        std::vector<Scenario> out;
        for (const auto& [s, name] : kScenarioNames) out.push_back(s);
        return out;
    }();
    return v;
}

std::string_view to_string(Scenario s) {
    for (const auto& [sc, name] : kScenarioNames)
        if (sc == s) return name;
    return "?";
}

Scenario parse_scenario(std::string_view name) {
    for (const auto& [sc, n] : kScenarioNames)
        if (n == name) return sc;
    std::string valid;
    for (const auto& [sc, n] : kScenarioNames) valid += (valid.empty() ? "" : ", ") + std::string(n);
    throw std::invalid_argument(fmt::format("unknown scenario '{}' (valid: {})", name, valid));
}

BenchConfig parse_config(std::string_view text) {
    BenchConfig cfg;
    PumpSection pump;
    // waist and kind have no default when [pump] is present
    bool pump_present = false;

    std::map<std::string, SectionParser> sections;
    {
        auto& p = sections["pump"];
        p.required = {"kind", "waist"};
        p.handlers["kind"] = [&](const std::string& v, const Where& w) { pump.kind = parse_pump_kind(v, w); };
        p.handlers["waist"] = [&](const std::string& v, const Where& w) { pump.waist = positive_length(v, w); };
        p.handlers["step_phase"] = [&](const std::string& v, const Where& w) { pump.step_phase = parse_plain(v, w); };
        p.handlers["transmission"] = [&](const std::string& v, const Where& w) {
            pump.transmission = unit_interval(v, w);
            if (pump.transmission == 0.0) w.fail("must be positive");
        };
        p.handlers["wavelength"] = [&](const std::string& v, const Where& w) { pump.wavelength = positive_length(v, w); };
        p.handlers["distance"] = [&](const std::string& v, const Where& w) {
            pump.distance = parse_length(v, w);
            if (!(pump.distance >= 0.0)) w.fail("must not be negative");
        };
        p.handlers["hg_m"] = [&](const std::string& v, const Where& w) { pump.hg_m = static_cast<int>(parse_integer(v, w, 0)); };
        p.handlers["hg_n"] = [&](const std::string& v, const Where& w) { pump.hg_n = static_cast<int>(parse_integer(v, w, 0)); };
    }
    {
        auto& p = sections["state"];
        p.handlers["mu"] = [&](const std::string& v, const Where& w) { cfg.state.mu = unit_interval(v, w); };
        p.handlers["pair_wavelength"] = [&](const std::string& v, const Where& w) {
            cfg.state.pair_wavelength = positive_length(v, w);
        };
        p.handlers["filter_bandwidth"] = [&](const std::string& v, const Where& w) {
            cfg.state.filter_bandwidth = positive_length(v, w);
        };
    }
    {
        auto& p = sections["grid"];
        p.handlers["samples"] = [&](const std::string& v, const Where& w) {
            cfg.grid.samples = static_cast<int>(parse_integer(v, w, 16));
        };
        p.handlers["window"] = [&](const std::string& v, const Where& w) { cfg.grid.window = positive_length(v, w); };
        p.handlers["quadrature_step"] = [&](const std::string& v, const Where& w) {
            cfg.grid.quadrature_step = positive_length(v, w);
        };
    }
    {
        auto& p = sections["detectors"];
        auto& d = cfg.detectors;
        p.handlers["circle_diameter"] = [&](const std::string& v, const Where& w) { d.circle_diameter = positive_length(v, w); };
        p.handlers["slit_x"] = [&](const std::string& v, const Where& w) { d.slit_x = positive_length(v, w); };
        p.handlers["slit_y"] = [&](const std::string& v, const Where& w) { d.slit_y = positive_length(v, w); };
        p.handlers["fixed_y"] = [&](const std::string& v, const Where& w) { d.fixed_y = parse_length(v, w); };
        p.handlers["antibunch_aperture"] = [&](const std::string& v, const Where& w) {
            if (v == "slit") d.antibunch_aperture = AntibunchAperture::Slit;
            else if (v == "point") d.antibunch_aperture = AntibunchAperture::Point;
            else w.fail(fmt::format("expected slit or point, got '{}'", v));
        };
    }
    {
        auto& p = sections["scan"];
        auto& s = cfg.scan;
        p.handlers["delay_max"] = [&](const std::string& v, const Where& w) { s.delay_max = positive_length(v, w); };
        p.handlers["delay_steps"] = [&](const std::string& v, const Where& w) {
            s.delay_steps = static_cast<int>(parse_integer(v, w, 3));
        };
        p.handlers["transverse_max"] = [&](const std::string& v, const Where& w) {
            s.transverse_max = positive_length(v, w);
        };
        p.handlers["transverse_steps"] = [&](const std::string& v, const Where& w) {
            s.transverse_steps = static_cast<int>(parse_integer(v, w, 2));
        };
        p.handlers["angle_steps"] = [&](const std::string& v, const Where& w) {
            s.angle_steps = static_cast<int>(parse_integer(v, w, 2));
        };
        p.handlers["fixed_angles"] = [&](const std::string& v, const Where& w) {
            s.fixed_angles.clear();
            for (const auto& item : split_list(v)) s.fixed_angles.push_back(parse_plain(item, w));
            if (s.fixed_angles.empty()) w.fail("needs at least one angle");
        };
    }
    {
        auto& p = sections["output"];
        auto& o = cfg.output;
        p.handlers["directory"] = [&](const std::string& v, const Where& w) {
            if (v.empty()) w.fail("must not be empty");
            o.directory = v;
        };
        p.handlers["exposure"] = [&](const std::string& v, const Where& w) {
            o.exposure = parse_plain(v, w);
            if (!(o.exposure > 0.0)) w.fail("must be positive");
        };
        p.handlers["seed"] = [&](const std::string& v, const Where& w) {
            o.seed = static_cast<std::uint64_t>(parse_integer(v, w, 0));
        };
        p.handlers["noise"] = [&](const std::string& v, const Where& w) { o.noise = parse_bool(v, w); };
    }

    std::set<std::string> seen_sections;
    SectionParser* current = nullptr;
    std::string current_name;
    int current_line = 0;
    ScenarioSection* scenario = nullptr;
    SectionParser scenario_parser;
    std::map<std::string, int> section_lines;

    auto finish_section = [&]() {
        if (!current) return;
        for (const auto& key : current->required) {
            if (!current->seen.count(key)) {
                throw ConfigError(current_line, key, fmt::format("required in [{}]", current_name));
            }
        }
        if (scenario) {
            if (!scenario->bells.empty() && scenario->mu.size() > 1 && scenario->mu.size() != scenario->bells.size()) {
                throw ConfigError(current_line, "mu",
                                  fmt::format("[{}] lists {} mu values for {} Bell states", current_name,
                                              scenario->mu.size(), scenario->bells.size()));
            }
            if (scenario->bells.empty() && scenario->mu.size() > 1) {
                throw ConfigError(current_line, "mu", fmt::format("[{}] lists several mu values but no bell list",
                                                                  current_name));
            }
        }
    };

    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line_no, "", "unterminated section header");
            const std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
            finish_section();
            if (!seen_sections.insert(name).second) {
                throw ConfigError(line_no, "", fmt::format("duplicate section [{}]", name));
            }
            current_name = name;
            current_line = line_no;
            scenario = nullptr;
            if (name.rfind("scenario.", 0) == 0) {
                Scenario sc;
                try {
                    sc = parse_scenario(name.substr(9));
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(line_no, "", e.what());
                }
                scenario = &cfg.scenarios[sc];
                scenario_parser = SectionParser{};
                auto* s = scenario;
                scenario_parser.handlers["bell"] = [s](const std::string& v, const Where& w) {
                    s->bells.clear();
                    for (const auto& item : split_list(v)) s->bells.push_back(parse_bell(item, w));
                };
                scenario_parser.handlers["mu"] = [s](const std::string& v, const Where& w) {
                    s->mu.clear();
                    for (const auto& item : split_list(v)) s->mu.push_back(unit_interval(item, w));
                };
                scenario_parser.handlers["pump"] = [s](const std::string& v, const Where& w) {
                    s->pump = parse_pump_kind(v, w);
                };
                current = &scenario_parser;
            } else {
                const auto it = sections.find(name);
                if (it == sections.end()) throw ConfigError(line_no, "", fmt::format("unknown section [{}]", name));
                current = &it->second;
                if (name == "pump") pump_present = true;
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line_no, "", fmt::format("expected 'key = value', got '{}'", line));
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ConfigError(line_no, "", "missing key before '='");
        if (!current) throw ConfigError(line_no, key, "key outside of any section");
        const auto h = current->handlers.find(key);
        if (h == current->handlers.end()) {
            throw ConfigError(line_no, key, fmt::format("unknown key in [{}]", current_name));
        }
        if (!current->seen.insert(key).second) throw ConfigError(line_no, key, "duplicate key");
        h->second(value, Where{line_no, key});
    }
    finish_section();
    if (pump_present) cfg.pump = pump;
    return cfg;
}

BenchConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(fmt::format("cannot read config '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string render(const BenchConfig& c) {
    std::string out;
    auto kv = [&](std::string_view k, const std::string& v) { out += fmt::format("{} = {}\n", k, v); };
    if (c.pump) {
        const auto& p = *c.pump;
        out += "[pump]\n";
        kv("kind", std::string(pump_name(p.kind)));
        kv("waist", fmt_length(p.waist));
        kv("step_phase", fmt_double(p.step_phase));
        kv("transmission", fmt_double(p.transmission));
        kv("wavelength", fmt_length(p.wavelength));
        kv("distance", fmt_length(p.distance));
        kv("hg_m", std::to_string(p.hg_m));
        kv("hg_n", std::to_string(p.hg_n));
        out += "\n";
    }
    out += "[state]\n";
    kv("mu", fmt_double(c.state.mu));
    kv("pair_wavelength", fmt_length(c.state.pair_wavelength));
    kv("filter_bandwidth", fmt_length(c.state.filter_bandwidth));
    out += "\n[grid]\n";
    kv("samples", std::to_string(c.grid.samples));
    kv("window", fmt_length(c.grid.window));
    if (c.grid.quadrature_step) kv("quadrature_step", fmt_length(*c.grid.quadrature_step));
    out += "\n[detectors]\n";
    kv("circle_diameter", fmt_length(c.detectors.circle_diameter));
    kv("slit_x", fmt_length(c.detectors.slit_x));
    kv("slit_y", fmt_length(c.detectors.slit_y));
    kv("antibunch_aperture", c.detectors.antibunch_aperture == AntibunchAperture::Slit ? "slit" : "point");
    kv("fixed_y", fmt_length(c.detectors.fixed_y));
    out += "\n[scan]\n";
    kv("delay_max", fmt_length(c.scan.delay_max));
    kv("delay_steps", std::to_string(c.scan.delay_steps));
    kv("transverse_max", fmt_length(c.scan.transverse_max));
    kv("transverse_steps", std::to_string(c.scan.transverse_steps));
    kv("angle_steps", std::to_string(c.scan.angle_steps));
    std::string angles;
    for (double a : c.scan.fixed_angles) angles += (angles.empty() ? "" : ", ") + fmt_double(a);
    kv("fixed_angles", angles);
    out += "\n[output]\n";
    kv("directory", c.output.directory);
    kv("exposure", fmt_double(c.output.exposure));
    kv("seed", std::to_string(c.output.seed));
    kv("noise", c.output.noise ? "true" : "false");
    for (const auto& [sc, s] : c.scenarios) {
        out += fmt::format("\n[scenario.{}]\n", to_string(sc));
        if (!s.bells.empty()) {
            std::string v;
            for (auto b : s.bells) v += (v.empty() ? "" : ", ") + std::string(to_string(b));
            kv("bell", v);
        }
        if (!s.mu.empty()) {
            std::string v;
            for (double m : s.mu) v += (v.empty() ? "" : ", ") + fmt_double(m);
            kv("mu", v);
        }
        if (s.pump) kv("pump", std::string(pump_name(*s.pump)));
    }
    return out;
}

std::string sha256_hex(std::string_view text) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
    return hex;
}

} // namespace twophoton
