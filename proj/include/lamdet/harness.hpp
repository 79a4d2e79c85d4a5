#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "lamdet/crb.hpp"
#include "lamdet/detectors.hpp"

namespace lamdet {

// Disjoint seed streams; calibration, curve, and hold-out trials never share
// noise realizations.
enum SeedStream : std::uint64_t {
    kCalibrationStream = 1,
    kCurveStream = 2,
    kHoldoutStream = 3,
};

struct ThresholdTable {
    double pfa = 0.0;
    int n_trials = 0;
    std::uint64_t master_seed = 0;
    std::map<std::string, double> entries; // detector token -> threshold

    double require(const DetectorKind& kind) const;
};

struct CurvePoint {
    std::string detector;
    double sinr_db = 0.0;
    double pd = 0.0;
    double rmse_du = 0.0; // NaN when the detector yields no estimate
    double rmse_db = 0.0; // 20 log10(rmse_du)
    double cos_est = 0.0; // NaN when the detector yields no estimate
    int n_trials = 0;
    int excluded_trials = 0;
};

struct McOptions {
    int threads = 0; // 0 = all hardware threads, 1 = serial reference path
};

/// Scenario bundle consumed by every Monte-Carlo entry point.
struct HarnessSetup {
    EnvironmentSpec env;
    PointingState pointing;
    MMConfig mm;
    DetectorOptions options;
    TargetTruth truth;

    DetectorContext context() const;
};

/// Runs body(trial) for every trial index. threads == 1 executes the plain
/// serial loop kept as the reference implementation; any other value runs
/// the OpenMP kernel. Results must be written to trial-indexed storage so
/// both paths fold identically.
void for_each_trial(int n_trials, int threads, const std::function<void(int)>& body);

/// Decision statistics of n_trials independent H0 draws (the calibration
/// kernel, also reused by the hold-out Pfa measurement and the benchmark).
std::vector<double> h0_statistics(const DetectorKind& kind, const HarnessSetup& setup,
                                  int n_trials, std::uint64_t master_seed,
                                  SeedStream stream, const McOptions& options = {});

/// Empirical (1 - pfa)-quantile (upper order statistic) of the H0 decision
/// statistic.
double calibrate_threshold(const DetectorKind& kind, const HarnessSetup& setup,
                           double pfa, int n_trials, std::uint64_t master_seed,
                           const McOptions& options = {});

ThresholdTable calibrate_thresholds(const std::vector<DetectorKind>& kinds,
                                    const HarnessSetup& setup, double pfa,
                                    int n_trials, std::uint64_t master_seed,
                                    const McOptions& options = {});

/// Re-measured false-alarm rate on held-out seeds.
double measure_pfa(const DetectorKind& kind, const HarnessSetup& setup,
                   double threshold, int n_trials, std::uint64_t master_seed,
                   const McOptions& options = {});

/// Pd / RMSE / cos_est versus SINR under common random numbers: every
/// detector sees the identical snapshot set in a trial, and the same noise
/// is reused across SINR points.
std::vector<CurvePoint> run_curves(const std::vector<DetectorKind>& kinds,
                                   const HarnessSetup& setup,
                                   const std::vector<double>& sinr_grid_db,
                                   const ThresholdTable& thresholds, int n_mc,
                                   std::uint64_t master_seed,
                                   const McOptions& options = {});

struct SteeringEstimate {
    double delta_u_hat = 0.0;
    CVec b_hat;
};

struct CosEstResult {
    double value = 0.0;
    int excluded = 0;
};

/// Average whitened cosine similarity between the true coupled steering
/// vector and the reconstructed one; degenerate trials are excluded and
/// counted.
CosEstResult cos_est_metric(const HermitianPD& m, double u0,
                            const CouplingProfile& true_profile,
                            const ArrayGeometry& geometry,
                            const PointingState& pointing,
                            const std::vector<SteeringEstimate>& estimates);

void write_curves_csv(std::ostream& os, const std::vector<CurvePoint>& points);
void write_threshold_csv(std::ostream& os, const ThresholdTable& table);
ThresholdTable read_threshold_csv(std::istream& is);

/// Locale-independent shortest round-trip formatting used by all CSV output.
std::string format_double(double value);

} // namespace lamdet
