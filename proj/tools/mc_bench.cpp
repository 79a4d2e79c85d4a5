// Benchmarks the Monte-Carlo H0 kernel: the serial reference loop against the
// OpenMP parallel-for, verifying that both produce bit-identical statistics.

#include <chrono>
#include <iostream>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "lamdet/config.hpp"

using namespace lamdet;
using Clock = std::chrono::steady_clock;

namespace {

double time_run(const DetectorKind& kind, const HarnessSetup& setup, int trials,
                std::uint64_t seed, int threads, std::vector<double>& stats_out) {
    const auto start = Clock::now();
    stats_out = h0_statistics(kind, setup, trials, seed, kCalibrationStream,
                              McOptions{threads});
    return std::chrono::duration<double>(Clock::now() - start).count();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Serial-versus-OpenMP benchmark of the Monte-Carlo kernel"};
    int trials = 20000;
    std::string detector = "GLRT_LAM";
    std::uint64_t seed = 20260810;
    app.add_option("--trials", trials, "trials per run");
    app.add_option("--detector", detector, "detector token (e.g. GLRT_LAM, MFLRT:8)");
    app.add_option("--seed", seed, "master seed");
    CLI11_PARSE(app, argc, argv);

    const ExperimentConfig config;
    const HarnessSetup setup = make_setup(config);
    const DetectorKind kind = parse_detector(detector, config.coupling_order);

#ifdef _OPENMP
    const int max_threads = omp_get_max_threads();
#else
    const int max_threads = 1;
#endif

    std::vector<double> reference;
    const double serial_s = time_run(kind, setup, trials, seed, 1, reference);
    std::cout << "kernel=" << detector_name(kind) << " trials=" << trials << "\n";
    std::cout << "threads,seconds,trials_per_sec,speedup,bit_identical\n";
    std::cout << "1," << format_double(serial_s) << ','
              << format_double(trials / serial_s) << ",1,ref\n";

    for (int threads = 2; threads <= max_threads; threads *= 2) {
        std::vector<double> stats;
        const double secs = time_run(kind, setup, trials, seed, threads, stats);
        const bool identical = stats == reference;
        std::cout << threads << ',' << format_double(secs) << ','
                  << format_double(trials / secs) << ','
                  << format_double(serial_s / secs) << ','
                  << (identical ? "yes" : "NO") << '\n';
        if (!identical) return 1;
    }
    return 0;
}
