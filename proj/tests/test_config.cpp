#include <doctest.h>

#include <sstream>

#include "test_support.hpp"

using namespace lamdet;

TEST_SUITE_BEGIN("config");

TEST_CASE("complex literal parsing") {
    CHECK(parse_complex("0.7") == Complex(0.7, 0.0));
    CHECK(parse_complex("-1.5") == Complex(-1.5, 0.0));
    CHECK(parse_complex("0.1+0.2i") == Complex(0.1, 0.2));
    CHECK(parse_complex("0.1-0.2j") == Complex(0.1, -0.2));
    CHECK(parse_complex("3i") == Complex(0.0, 3.0));
    CHECK(parse_complex("-i") == Complex(0.0, -1.0));
    CHECK(parse_complex("1e-3+2e-4i") == Complex(1e-3, 2e-4));
    CHECK_THROWS(parse_complex("fish"));
    CHECK_THROWS(parse_complex(""));
}

TEST_CASE("defaults reproduce the baseline scenario") {
    const ExperimentConfig config;
    CHECK(config.n_elements == 16);
    CHECK(config.u_bar == doctest::Approx(u_from_deg(35.0)).epsilon(1e-12));
    CHECK(config.alpha == doctest::Approx(0.891 / 16.0));
    CHECK(config.k_secondary == 48);
    const HarnessSetup setup = make_setup(config);
    CHECK(setup.truth.u0 == doctest::Approx(config.u_bar + 0.0349));
}

TEST_CASE("degrees convert to directional cosines") {
    const auto config = parse_config_text(
        "look_angle_deg = 35\n"
        "jammer_angle_deg = 60 -20\n"
        "jammer_power_db = 30 40\n"
        "target_angle_deg = 37.476\n",
        "inline");
    CHECK(config.u_bar == doctest::Approx(0.573576).epsilon(1e-5));
    CHECK(config.jammer_u[0] == doctest::Approx(0.866025).epsilon(1e-5));
    CHECK(config.jammer_u[1] == doctest::Approx(-0.342020).epsilon(1e-5));
    CHECK(config.target_delta_u ==
          doctest::Approx(u_from_deg(37.476) - u_from_deg(35.0)).epsilon(1e-9));
}

TEST_CASE("unknown, duplicate, and conflicting keys are rejected with line info") {
    const auto rejects = [](const std::string& text, const std::string& needle) {
        try {
            parse_config_text(text, "cfg");
            FAIL_CHECK("expected ConfigError for: " << text);
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    rejects("n_elements = 16\nwibble = 3\n", "cfg:2");
    rejects("wibble = 3\n", "unknown key");
    rejects("pfa = 0.01\npfa = 0.02\n", "duplicate");
    rejects("u_bar = 0.5\nlook_angle_deg = 30\n", "not both");
    rejects("pfa == 0.01\n", "expected a number");
    rejects("pfa\n", "expected 'key = value'");
    rejects("coupling_order = 3\ncoupling_coeffs = 0.7\n", "coupling_order - 1");
    rejects("jammer_u = 0.5\njammer_power_db = 10 20\n", "same length");
}

TEST_CASE("comments and blank lines are ignored") {
    const auto config = parse_config_text(
        "# scenario\n"
        "\n"
        "k_secondary = 80   # more training data\n",
        "inline");
    CHECK(config.k_secondary == 80);
}

TEST_CASE("config echo is re-parseable and stable") {
    ExperimentConfig config;
    config.master_seed = 777;
    config.detectors = {"GLRT_LAM", "MFLRT:8"};
    std::ostringstream os;
    write_config_echo(os, config);
    const ExperimentConfig reparsed = parse_config_text(os.str(), "echo");
    CHECK(reparsed.master_seed == 777);
    CHECK(reparsed.detectors == config.detectors);
    CHECK(reparsed.u_bar == config.u_bar);
    CHECK(reparsed.coupling_coeffs == config.coupling_coeffs);

    std::ostringstream twice;
    write_config_echo(twice, reparsed);
    CHECK(twice.str() == os.str());
}

TEST_CASE("environment assembly validates the secondary data budget") {
    ExperimentConfig config;
    config.k_secondary = 8;
    CHECK_THROWS_AS(make_environment(config), ConfigError);
}

TEST_CASE("detector list parsing uses the coupling order as default") {
    ExperimentConfig config;
    config.detectors = {"GLRT_LAM", "MFLRT:8"};
    const auto kinds = make_detectors(config);
    REQUIRE(kinds.size() == 2);
    CHECK(kinds[0].order == config.coupling_order);
    CHECK(kinds[1].order == 8);

    config.detectors = {"NOT_A_DETECTOR"};
    CHECK_THROWS_AS(make_detectors(config), ConfigError);
}

TEST_SUITE_END();
