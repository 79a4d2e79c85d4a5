#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lamdet/harness.hpp"

namespace lamdet {

/// Configuration problem (bad file, bad key, bad value). The CLI maps this
/// to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One experiment, fully resolved. Defaults reproduce the baseline scenario
/// shipped in configs/baseline.cfg at desk scale.
struct ExperimentConfig {
    int n_elements = 16;
    double spacing_over_wavelength = 0.5;
    double u_bar = 0.57357643635104605; // sin(35 deg)
    double alpha = 0.891 / 16.0;        // 3 dB single-side beamwidth at boresight
    int coupling_order = 3;
    std::vector<Complex> coupling_coeffs = {Complex(0.7, 0.0), Complex(0.4, 0.0)};
    std::vector<double> jammer_u = {0.866, -0.342};
    std::vector<double> jammer_power_db = {30.0, 40.0};
    bool jammer_coupled = true;
    double noise_power = 1.0;
    int k_secondary = 48;

    double pfa = 1e-3;
    int calibration_trials = 100000;
    int mc_trials = 500;
    std::uint64_t master_seed = 20260810;
    std::vector<double> sinr_grid_db = {5.0, 7.5, 10.0, 12.5, 15.0, 17.5,
                                        20.0, 22.5, 25.0, 27.5, 30.0};
    std::vector<std::string> detectors = {
        "GLRT_LAM",    "GLRT_LAM_2S",  "MFLRT:8",      "MFLRT_2S:8", "BEN_GLRT",
        "BEN_GLRT_NC", "BEN_GLRT_DOA", "CLASSIC_GLRT", "SUBSPACE_SD"};

    double mm_epsilon = 1e-8;
    int mm_max_iters = 200;
    double stage2_alpha = 0.0; // 0 = same bound as stage 1

    double target_delta_u = 0.0349;
    double target_phase = 0.0;

    double scan_u0 = 0.57357643635104605;
    double scan_step_deg = 0.01;
    double scan_halfwidth_deg = 5.0; // peak scan window around asin(scan_u0)

    bool mflrt_log_form = true;
    bool ben_doa_verbatim = false;

    std::string thresholds_file; // empty = <out>/thresholds.csv
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

/// Canonical key = value form of the resolved configuration; re-parseable.
void write_config_echo(std::ostream& os, const ExperimentConfig& config);

EnvironmentSpec make_environment(const ExperimentConfig& config);
HarnessSetup make_setup(const ExperimentConfig& config);
std::vector<DetectorKind> make_detectors(const ExperimentConfig& config);

Complex parse_complex(const std::string& token); // "0.7", "0.1+0.2i", "-3i"
std::string format_complex(Complex value);

} // namespace lamdet
