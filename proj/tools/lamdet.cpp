// Command-line front end: calibrate detection thresholds, run Pd/RMSE/cos_est
// curves, tabulate CRBs, scan steering-vector similarity, or run the built-in
// selftest. All experiment parameters come from a key = value config file;
// outputs are CSV files plus a resolved-config echo for provenance.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "lamdet/config.hpp"
#include "lamdet/selftest.hpp"

namespace fs = std::filesystem;
using namespace lamdet;

namespace {

std::ofstream open_output(const fs::path& path) {
    std::ofstream file(path, std::ios::binary); // LF terminators everywhere
    if (!file) {
        throw ConfigError("cannot write output file: " + path.string());
    }
    return file;
}

void echo_config(const fs::path& out_dir, const ExperimentConfig& config) {
    auto file = open_output(out_dir / "resolved_config.cfg");
    write_config_echo(file, config);
}

fs::path thresholds_path(const ExperimentConfig& config, const fs::path& out_dir) {
    if (!config.thresholds_file.empty()) return fs::path(config.thresholds_file);
    return out_dir / "thresholds.csv";
}

int run_calibrate(const ExperimentConfig& config, const fs::path& out_dir,
                  const McOptions& mc) {
    const HarnessSetup setup = make_setup(config);
    const std::vector<DetectorKind> kinds = make_detectors(config);
    const ThresholdTable table =
        calibrate_thresholds(kinds, setup, config.pfa, config.calibration_trials,
                             config.master_seed, mc);
    auto file = open_output(thresholds_path(config, out_dir));
    write_threshold_csv(file, table);
    echo_config(out_dir, config);
    std::cout << "calibrated " << table.entries.size() << " detectors at pfa "
              << format_double(config.pfa) << " -> "
              << thresholds_path(config, out_dir).string() << '\n';
    return 0;
}

int run_curves_cmd(const ExperimentConfig& config, const fs::path& out_dir,
                   const McOptions& mc) {
    const fs::path table_path = thresholds_path(config, out_dir);
    std::ifstream table_file(table_path, std::ios::binary);
    if (!table_file) {
        throw ConfigError("threshold table not found: " + table_path.string() +
                          " (run the calibrate subcommand first)");
    }
    const ThresholdTable table = read_threshold_csv(table_file);

    const HarnessSetup setup = make_setup(config);
    const std::vector<DetectorKind> kinds = make_detectors(config);
    const std::vector<CurvePoint> points =
        run_curves(kinds, setup, config.sinr_grid_db, table, config.mc_trials,
                   config.master_seed, mc);
    auto file = open_output(out_dir / "curves.csv");
    write_curves_csv(file, points);
    echo_config(out_dir, config);
    std::cout << "wrote " << points.size() << " curve points -> "
              << (out_dir / "curves.csv").string() << '\n';
    return 0;
}

int run_crb(const ExperimentConfig& config, const fs::path& out_dir) {
    const HarnessSetup setup = make_setup(config);
    const HermitianPD m = build_covariance(setup.env);
    const ArrayGeometry& geometry = setup.env.geometry;
    const int order = setup.env.coupling.order();
    const CMat c = coupling_matrix(setup.env.coupling, geometry.n_elements);
    const CVec p_m = c * steering(geometry, setup.truth.u0);
    const ManifoldBasis basis = manifold_basis(geometry, setup.pointing, order);

    auto file = open_output(out_dir / "crb.csv");
    file << "model,sinr_db,crb,crb_db\n";
    for (const double sinr : config.sinr_grid_db) {
        const Complex a = amplitude_for_sinr(sinr, m, p_m, config.target_phase);
        CVec b(order);
        b(0) = a;
        for (int i = 1; i < order; ++i) b(i) = a * setup.env.coupling.coeffs()[i - 1];
        const double actual =
            crb_actual(m, setup.truth.u0, b, geometry, order).crb_value;
        const double lin =
            crb_linearized(m, setup.truth.delta_u, b, basis).crb_value;
        file << "actual," << format_double(sinr) << ',' << format_double(actual)
             << ',' << format_double(10.0 * std::log10(actual)) << '\n';
        file << "linearized," << format_double(sinr) << ',' << format_double(lin)
             << ',' << format_double(10.0 * std::log10(lin)) << '\n';
    }
    echo_config(out_dir, config);
    std::cout << "wrote CRB table -> " << (out_dir / "crb.csv").string() << '\n';
    return 0;
}

int run_scan(const ExperimentConfig& config, const fs::path& out_dir) {
    const HarnessSetup setup = make_setup(config);
    const ArrayGeometry& geometry = setup.env.geometry;
    const CMat c = coupling_matrix(setup.env.coupling, geometry.n_elements);

    // Self-similarity of the coupled manifold over a u-uniform grid.
    {
        auto file = open_output(out_dir / "cos_similarity.csv");
        file << "u,theta_deg,cos_s\n";
        const int steps = 2000;
        for (int i = 0; i <= steps; ++i) {
            const double u = -1.0 + 2.0 * i / steps;
            const CVec p = steering(geometry, u);
            const double value = cosine_similarity(CVec(c * p), p);
            file << format_double(u) << ',' << format_double(deg_from_u(u)) << ','
                 << format_double(value) << '\n';
        }
    }

    // Peak displacement of the cross-similarity around the scan direction.
    const double theta0 = deg_from_u(config.scan_u0);
    std::vector<double> grid;
    for (double theta = theta0 - config.scan_halfwidth_deg;
         theta <= theta0 + config.scan_halfwidth_deg + 1e-12;
         theta += config.scan_step_deg) {
        grid.push_back(theta);
    }
    const PeakScanResult scan =
        peak_mismatch_scan(geometry, setup.env.coupling, config.scan_u0, grid);
    {
        auto file = open_output(out_dir / "peak_scan.csv");
        file << "theta_deg,cos_s\n";
        for (std::size_t i = 0; i < scan.theta_deg.size(); ++i) {
            file << format_double(scan.theta_deg[i]) << ','
                 << format_double(scan.cos_values[i]) << '\n';
        }
    }
    {
        auto file = open_output(out_dir / "peak_summary.csv");
        file << "u0,theta0_deg,peak_theta_deg,displacement_deg\n";
        file << format_double(config.scan_u0) << ',' << format_double(theta0) << ','
             << format_double(scan.peak_theta_deg) << ','
             << format_double(scan.displacement_deg) << '\n';
    }
    echo_config(out_dir, config);
    std::cout << "peak at " << format_double(scan.peak_theta_deg)
              << " deg, displacement " << format_double(scan.displacement_deg)
              << " deg\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive radar detection and bearing estimation for a ULA "
                 "with unknown mutual coupling"};
    app.require_subcommand(1);
    app.fallthrough(); // accept the global options after the subcommand too

    std::string config_path;
    std::string out_dir_arg = ".";
    int threads = 0;
    std::uint64_t seed_override = 0;
    bool has_seed_override = false;

    app.add_option("--config", config_path, "experiment config file");
    app.add_option("--out", out_dir_arg, "output directory (created if missing)");
    app.add_option("--threads", threads, "worker threads (0 = all, 1 = serial)");
    app.add_option("--seed", seed_override, "master seed override")
        ->each([&](const std::string&) { has_seed_override = true; });

    auto* cmd_calibrate =
        app.add_subcommand("calibrate", "Monte-Carlo threshold calibration");
    auto* cmd_curves =
        app.add_subcommand("curves", "Pd / RMSE / cos_est versus SINR");
    auto* cmd_crb = app.add_subcommand("crb", "CRB versus SINR for both models");
    auto* cmd_scan =
        app.add_subcommand("scan", "cosine-similarity scans of the coupled manifold");
    auto* cmd_selftest = app.add_subcommand("selftest", "run the invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (cmd_selftest->parsed()) {
            return run_selftest(std::cout) == 0 ? 0 : 4;
        }
        if (config_path.empty()) {
            throw ConfigError("--config is required for this subcommand");
        }
        ExperimentConfig config = parse_config_file(config_path);
        if (has_seed_override) config.master_seed = seed_override;

        const fs::path out_dir(out_dir_arg);
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) {
            throw ConfigError("cannot create output directory: " + out_dir.string());
        }
        const McOptions mc{threads};

        if (cmd_calibrate->parsed()) return run_calibrate(config, out_dir, mc);
        if (cmd_curves->parsed()) return run_curves_cmd(config, out_dir, mc);
        if (cmd_crb->parsed()) return run_crb(config, out_dir);
        if (cmd_scan->parsed()) return run_scan(config, out_dir);
        throw ConfigError("no subcommand given");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
