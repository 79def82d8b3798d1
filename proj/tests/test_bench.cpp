#include "twophoton/bench.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace twophoton;

namespace {

const std::filesystem::path kShipped = std::filesystem::path(TWOPHOTON_CONFIG_DIR) / "apparatus.conf";

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("twophoton_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

/// Small, fast bench for runner tests.
BenchConfig small_config() {
    auto c = parse_config("[pump]\nkind = phase_step\nwaist = 1 mm\n"
                          "[grid]\nsamples = 128\n"
                          "[scan]\ndelay_steps = 11\ntransverse_steps = 7\nangle_steps = 13\n");
    return c;
}

} // namespace

TEST(ParseConfig, PhaseStepExample) {
    const auto c = parse_config("[pump]\nkind = phase_step\nwaist = 1 mm\nstep_phase = 3.141592653589793");
    ASSERT_TRUE(c.pump.has_value());
    EXPECT_EQ(c.pump->kind, PumpKind::PhaseStep);
    EXPECT_DOUBLE_EQ(c.pump->waist, 1e-3);
    EXPECT_DOUBLE_EQ(c.pump->step_phase, 3.141592653589793);
    // documented defaults
    EXPECT_DOUBLE_EQ(c.pump->wavelength, 351e-9);
    EXPECT_DOUBLE_EQ(c.pump->distance, 3.0);
    EXPECT_DOUBLE_EQ(c.state.filter_bandwidth, 1e-9);
    EXPECT_EQ(c.grid.samples, 256);
}

TEST(ParseConfig, UnitsAndComments) {
    const auto c = parse_config("# bench\n[pump]  # trailing\nkind = gaussian\nwaist = 800um\n"
                                "wavelength = 0.351e-6\ndistance = 3000 mm\n");
    EXPECT_DOUBLE_EQ(c.pump->waist, 800e-6);
    EXPECT_DOUBLE_EQ(c.pump->wavelength, 0.351e-6);
    EXPECT_DOUBLE_EQ(c.pump->distance, 3.0);
}

TEST(ParseConfig, NegativeWaistNamesKeyAndLine) {
    try {
        (void)parse_config("[pump]\nkind = gaussian\nwaist = -1 mm\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 3);
        EXPECT_EQ(e.key(), "waist");
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
}

TEST(ParseConfig, RejectsMistakes) {
    auto line_of = [](const std::string& text) {
        try {
            (void)parse_config(text);
        } catch (const ConfigError& e) {
            return e.line();
        }
        return -1;
    };
    EXPECT_EQ(line_of("[pump]\nkind = gaussian\nwiast = 1 mm\n"), 3);         // misspelt key
    EXPECT_EQ(line_of("[pumps]\n"), 1);                                        // unknown section
    EXPECT_EQ(line_of("[state]\nmu = 0.5\n[state]\n"), 3);                     // duplicate section
    EXPECT_EQ(line_of("[state]\nmu = 0.5\nmu = 0.6\n"), 3);                    // duplicate key
    EXPECT_EQ(line_of("mu = 0.5\n"), 1);                                        // outside a section
    EXPECT_EQ(line_of("[state]\nmu 0.5\n"), 2);                                // no '='
    EXPECT_EQ(line_of("[state]\nmu = 1.5\n"), 2);                              // out of range
    EXPECT_EQ(line_of("[state]\npair_wavelength = 702 parsecs\n"), 2);        // bad unit
    EXPECT_EQ(line_of("[state]\nmu = 1 mm\n"), 2);                             // unit on a plain number
    EXPECT_EQ(line_of("[grid]\nsamples = 12.5\n"), 2);
    EXPECT_EQ(line_of("[scenario.hom_triple_dip]\n"), 1);
    EXPECT_EQ(line_of("[scenario.sameport_hv]\nbell = psi_minus, psi_plus\nmu = 0.1, 0.2, 0.3\n"), 1);
    EXPECT_EQ(line_of("[pump]\nkind = gaussian\n"), 1);                        // waist required
    EXPECT_EQ(line_of("[scenario.sameport_hv]\nbell = psi_zero\n"), 2);
}

TEST(ParseConfig, ShippedApparatusResolves) {
    const auto c = load_config(kShipped);
    ASSERT_TRUE(c.pump.has_value());
    EXPECT_DOUBLE_EQ(c.pump->wavelength, 351e-9);
    EXPECT_DOUBLE_EQ(c.pump->distance, 3.0);
    EXPECT_DOUBLE_EQ(c.state.pair_wavelength, 702e-9);
    EXPECT_DOUBLE_EQ(c.state.filter_bandwidth, 1e-9);
    EXPECT_DOUBLE_EQ(c.detectors.circle_diameter, 3e-3);
    EXPECT_DOUBLE_EQ(c.detectors.slit_x, 3e-3);
    EXPECT_DOUBLE_EQ(c.detectors.slit_y, 0.3e-3);
    EXPECT_EQ(c.scenarios.size(), 7u);
    EXPECT_EQ(c.scenarios.at(Scenario::HomOddSinglet).mu, std::vector<double>{0.82});
}

TEST(Render, RoundTrips) {
    auto c = load_config(kShipped);
    EXPECT_EQ(parse_config(render(c)), c);
    c.grid.quadrature_step = 0.05e-3;
    c.output.noise = true;
    c.output.seed = 99;
    c.scan.fixed_angles = {0.0, 22.5, 45.0};
    c.pump->kind = PumpKind::HermiteGauss;
    c.pump->waist = 0.7e-3 / 3.0;
    c.detectors.antibunch_aperture = AntibunchAperture::Point;
    EXPECT_EQ(parse_config(render(c)), c);
    EXPECT_EQ(parse_config(render(BenchConfig{})), BenchConfig{});
}

TEST(Scenario, NamesRoundTrip) {
    for (auto s : all_scenarios()) EXPECT_EQ(parse_scenario(to_string(s)), s);
    EXPECT_THROW(parse_scenario("hom"), std::invalid_argument);
}

TEST(RunScenario, MissingPumpSectionNamesRequirement) {
    const auto c = parse_config("[state]\nmu = 0.9\n");
    try {
        (void)run_scenario(c, Scenario::HomOddSinglet);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("hom_odd_singlet"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("[pump]"), std::string::npos);
    }
    // The source-arm test needs no pump.
    EXPECT_NO_THROW((void)run_scenario(c, Scenario::PolarizationTest));
}

TEST(RunScenario, CsvRowsMatchSteps) {
    const auto c = small_config();
    const auto dir = scratch_dir("rows");
    std::vector<ScenarioReport> reports = {run_scenario(c, Scenario::HomOddSinglet),
                                           run_scenario(c, Scenario::PolarizationTest)};
    const auto paths = write_outputs(reports, dir);
    ASSERT_EQ(paths.size(), 4u);  // two polarizer settings + one delay scan + summary
    for (const auto& p : paths) {
        if (p.filename() == "summary.txt") continue;
        std::istringstream in(slurp(p));
        std::string line;
        int rows = 0;
        std::getline(in, line);
        EXPECT_EQ(line, "abscissa,rate,sigma");
        while (std::getline(in, line))
            if (line[0] != '#') ++rows;
        EXPECT_EQ(rows, p.filename().string().rfind("hom", 0) == 0 ? 11 : 13) << p;
    }
    std::filesystem::remove_all(dir);
}

TEST(RunScenario, DeterministicOutputs) {
    const auto c = small_config();
    const auto a = scratch_dir("det_a");
    const auto b = scratch_dir("det_b");
    write_outputs({run_scenario(c, Scenario::SameportHv)}, a);
    write_outputs({run_scenario(c, Scenario::SameportHv)}, b);
    for (const auto& name : {"summary.txt", "sameport_hv_psi_minus.csv", "sameport_hv_psi_plus.csv"}) {
        EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
        EXPECT_FALSE(slurp(a / name).empty());
    }
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
}

TEST(RunScenario, SeedOnlyMattersWithNoise) {
    auto c = small_config();
    auto d = c;
    d.output.seed = 12345;
    const auto ra = run_scenario(c, Scenario::HomOddSinglet);
    const auto rb = run_scenario(d, Scenario::HomOddSinglet);
    EXPECT_EQ(ra.scans[0].scan.rates, rb.scans[0].scan.rates);
    EXPECT_NE(ra.digest, rb.digest);

    c.output.noise = d.output.noise = true;
    c.output.exposure = d.output.exposure = 1e4;
    const auto na = run_scenario(c, Scenario::HomOddSinglet);
    const auto nb = run_scenario(d, Scenario::HomOddSinglet);
    EXPECT_EQ(na.scans[0].scan.rates, nb.scans[0].scan.rates);
    EXPECT_NE(na.scans[0].scan.sampled, nb.scans[0].scan.sampled);
    EXPECT_EQ(run_scenario(c, Scenario::HomOddSinglet).scans[0].scan.sampled, na.scans[0].scan.sampled);
}

TEST(RunScenario, DigestStableAcrossRuns) {
    const auto c = small_config();
    EXPECT_EQ(run_scenario(c, Scenario::PolarizationTest).digest, run_scenario(c, Scenario::PolarizationTest).digest);
    EXPECT_NE(run_scenario(c, Scenario::PolarizationTest).digest, run_scenario(c, Scenario::HomEvenDip).digest);
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(WriteOutputs, ReportsUnwritablePath) {
    const auto dir = scratch_dir("blocked");
    std::ofstream(dir.string()) << "a file, not a directory";
    try {
        write_outputs({run_scenario(small_config(), Scenario::PolarizationTest)}, dir / "sub");
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find(dir.string()), std::string::npos);
    }
    std::filesystem::remove(dir);
}
