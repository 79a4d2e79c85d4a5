#include "lamdet/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lamdet/rng.hpp"

namespace lamdet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

} // namespace

DetectorContext HarnessSetup::context() const {
    return DetectorContext{env.geometry, pointing, env.coupling, truth.u0, mm, options};
}

double ThresholdTable::require(const DetectorKind& kind) const {
    const auto it = entries.find(detector_name(kind));
    if (it == entries.end()) {
        throw IncompleteSpecification("threshold missing for " + detector_name(kind));
    }
    return it->second;
}

void for_each_trial(int n_trials, int threads, const std::function<void(int)>& body) {
    if (n_trials < 0) {
        throw std::invalid_argument("for_each_trial: negative trial count");
    }
    if (threads == 1) {
        // Serial reference path; kept deliberately free of OpenMP so the
        // parallel kernel can be validated against it.
        for (int t = 0; t < n_trials; ++t) body(t);
        return;
    }
#ifdef _OPENMP
    const int max_threads = omp_get_max_threads();
    const int use = threads > 0 ? std::min(threads, 4 * max_threads) : max_threads;
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic, 8) num_threads(use)
    for (int t = 0; t < n_trials; ++t) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            body(t);
        } catch (const std::exception& e) {
            const std::lock_guard<std::mutex> lock(error_mutex);
            if (!failed.exchange(true)) first_error = e.what();
        }
    }
    if (failed.load()) {
        throw Error("for_each_trial: trial failed: " + first_error);
    }
#else
    for (int t = 0; t < n_trials; ++t) body(t);
#endif
}

std::vector<double> h0_statistics(const DetectorKind& kind, const HarnessSetup& setup,
                                  int n_trials, std::uint64_t master_seed,
                                  SeedStream stream, const McOptions& options) {
    const HermitianPD m = build_covariance(setup.env);
    const CMat m_sqrt = hermitian_sqrt(m);
    const DetectorContext ctx = setup.context();
    const DetectorKind decide = decision_kind(kind);
    const int k = setup.env.k_secondary;

    std::vector<double> stats(static_cast<std::size_t>(n_trials));
    for_each_trial(n_trials, options.threads, [&](int t) {
        const SnapshotSet snaps = draw_snapshots_colored(
            m_sqrt, std::nullopt, k, derive_seed(master_seed, stream, t));
        stats[static_cast<std::size_t>(t)] =
            evaluate_detector(decide, snaps, ctx).statistic;
    });
    return stats;
}

double calibrate_threshold(const DetectorKind& kind, const HarnessSetup& setup,
                           double pfa, int n_trials, std::uint64_t master_seed,
                           const McOptions& options) {
    if (!(pfa > 0.0) || !(pfa < 1.0)) {
        throw std::invalid_argument("calibrate_threshold: pfa must lie in (0, 1)");
    }
    if (n_trials * pfa < 50.0) {
        throw CalibrationUnderpowered("calibrate_threshold: n_trials * pfa < 50");
    }
    std::vector<double> stats =
        h0_statistics(kind, setup, n_trials, master_seed, kCalibrationStream, options);
    std::sort(stats.begin(), stats.end());
    const auto index = static_cast<std::size_t>(
        std::clamp(std::ceil((1.0 - pfa) * n_trials), 1.0,
                   static_cast<double>(n_trials)));
    return stats[index - 1];
}

ThresholdTable calibrate_thresholds(const std::vector<DetectorKind>& kinds,
                                    const HarnessSetup& setup, double pfa,
                                    int n_trials, std::uint64_t master_seed,
                                    const McOptions& options) {
    ThresholdTable table;
    table.pfa = pfa;
    table.n_trials = n_trials;
    table.master_seed = master_seed;
    for (const DetectorKind& kind : kinds) {
        table.entries[detector_name(kind)] =
            calibrate_threshold(kind, setup, pfa, n_trials, master_seed, options);
    }
    return table;
}

double measure_pfa(const DetectorKind& kind, const HarnessSetup& setup,
                   double threshold, int n_trials, std::uint64_t master_seed,
                   const McOptions& options) {
    const std::vector<double> stats =
        h0_statistics(kind, setup, n_trials, master_seed, kHoldoutStream, options);
    const auto alarms = std::count_if(stats.begin(), stats.end(),
                                      [&](double s) { return s > threshold; });
    return static_cast<double>(alarms) / static_cast<double>(n_trials);
}

namespace {

struct TrialRecord {
    double decision = 0.0;
    bool has_estimate = false;
    double delta_u_hat = 0.0;
    CVec b_hat;
};

} // namespace

std::vector<CurvePoint> run_curves(const std::vector<DetectorKind>& kinds,
                                   const HarnessSetup& setup,
                                   const std::vector<double>& sinr_grid_db,
                                   const ThresholdTable& thresholds, int n_mc,
                                   std::uint64_t master_seed,
                                   const McOptions& options) {
    if (n_mc < 1) {
        throw std::invalid_argument("run_curves: n_mc must be >= 1");
    }
    for (const DetectorKind& kind : kinds) {
        (void)thresholds.require(kind); // precondition: every kind calibrated
    }
    const HermitianPD m = build_covariance(setup.env);
    const CMat m_sqrt = hermitian_sqrt(m);
    const DetectorContext ctx = setup.context();
    const int k = setup.env.k_secondary;
    const CMat c_true =
        coupling_matrix(setup.env.coupling, setup.env.geometry.n_elements);
    const CVec p_m_target = c_true * steering(setup.env.geometry, setup.truth.u0);
    const double phase =
        std::abs(setup.truth.amplitude) > 0.0 ? std::arg(setup.truth.amplitude) : 0.0;

    std::vector<CurvePoint> points;
    points.reserve(kinds.size() * sinr_grid_db.size());

    for (const double sinr : sinr_grid_db) {
        const Complex a = amplitude_for_sinr(sinr, m, p_m_target, phase);
        const CVec signal = a * p_m_target;

        std::vector<std::vector<TrialRecord>> records(
            kinds.size(), std::vector<TrialRecord>(static_cast<std::size_t>(n_mc)));
        for_each_trial(n_mc, options.threads, [&](int t) {
            // Same seed per trial index across SINR points: common random
            // numbers for every detector and along the whole curve.
            const SnapshotSet snaps = draw_snapshots_colored(
                m_sqrt, signal, k, derive_seed(master_seed, kCurveStream, t));
            for (std::size_t d = 0; d < kinds.size(); ++d) {
                const DetectionReport report = evaluate_detector(kinds[d], snaps, ctx);
                TrialRecord& rec = records[d][static_cast<std::size_t>(t)];
                rec.decision = decision_statistic(report);
                if (report.delta_u_hat && report.b_hat) {
                    rec.has_estimate = true;
                    rec.delta_u_hat = *report.delta_u_hat;
                    rec.b_hat = *report.b_hat;
                }
            }
        });

        for (std::size_t d = 0; d < kinds.size(); ++d) {
            const double threshold = thresholds.require(kinds[d]);
            CurvePoint point;
            point.detector = detector_name(kinds[d]);
            point.sinr_db = sinr;
            point.n_trials = n_mc;

            int detections = 0;
            double sq_err_sum = 0.0;
            bool any_estimate = false;
            std::vector<SteeringEstimate> estimates;
            estimates.reserve(static_cast<std::size_t>(n_mc));
            for (const TrialRecord& rec : records[d]) {
                if (rec.decision > threshold) ++detections;
                if (rec.has_estimate) {
                    any_estimate = true;
                    const double err = setup.truth.delta_u - rec.delta_u_hat;
                    sq_err_sum += err * err;
                    estimates.push_back(SteeringEstimate{rec.delta_u_hat, rec.b_hat});
                }
            }
            point.pd = static_cast<double>(detections) / static_cast<double>(n_mc);
            if (any_estimate) {
                point.rmse_du = std::sqrt(sq_err_sum / static_cast<double>(n_mc));
                point.rmse_db = 20.0 * std::log10(point.rmse_du);
                const CosEstResult cos_est =
                    cos_est_metric(m, setup.truth.u0, setup.env.coupling,
                                   setup.env.geometry, setup.pointing, estimates);
                point.cos_est = cos_est.value;
                point.excluded_trials = cos_est.excluded;
            } else {
                point.rmse_du = kNaN;
                point.rmse_db = kNaN;
                point.cos_est = kNaN;
            }
            points.push_back(std::move(point));
        }
    }
    return points;
}

CosEstResult cos_est_metric(const HermitianPD& m, double u0,
                            const CouplingProfile& true_profile,
                            const ArrayGeometry& geometry,
                            const PointingState& pointing,
                            const std::vector<SteeringEstimate>& estimates) {
    if (estimates.empty()) {
        throw NoValidTrials("cos_est_metric: no estimates supplied");
    }
    const CMat c_true = coupling_matrix(true_profile, geometry.n_elements);
    const CVec p_m = c_true * steering(geometry, u0);

    Eigen::LLT<CMat> llt(m.matrix());
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("cos_est_metric: covariance not PD");
    }
    const CVec m_inv_p = llt.solve(p_m);
    const double p_m_whitened = std::sqrt(p_m.dot(m_inv_p).real());

    double sum = 0.0;
    int valid = 0;
    int excluded = 0;
    for (const SteeringEstimate& est : estimates) {
        const double u_hat = pointing.u_bar + est.delta_u_hat;
        if (std::abs(u_hat) > 1.0) {
            ++excluded;
            continue;
        }
        CouplingEstimate coupling;
        try {
            coupling = coupling_from_b(est.b_hat);
        } catch (const DegenerateAmplitude&) {
            ++excluded;
            continue;
        }
        const CouplingProfile profile(static_cast<int>(est.b_hat.size()),
                                      coupling.c_hat);
        const CMat c_hat = coupling_matrix(profile, geometry.n_elements);
        const CVec p_hat = c_hat * steering(geometry, u_hat);
        const double denom =
            p_m_whitened * std::sqrt(p_hat.dot(llt.solve(p_hat)).real());
        if (!(denom > 0.0)) {
            ++excluded;
            continue;
        }
        sum += std::abs(m_inv_p.dot(p_hat)) / denom;
        ++valid;
    }
    if (valid == 0) {
        throw NoValidTrials("cos_est_metric: all trials degenerate");
    }
    return CosEstResult{sum / static_cast<double>(valid), excluded};
}

std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc()) return "nan";
    return std::string(buffer, ptr);
}

void write_curves_csv(std::ostream& os, const std::vector<CurvePoint>& points) {
    os << "detector,sinr_db,pd,rmse_du,rmse_db,cos_est,n_trials,excluded_trials\n";
    for (const CurvePoint& p : points) {
        os << p.detector << ',' << format_double(p.sinr_db) << ','
           << format_double(p.pd) << ',' << format_double(p.rmse_du) << ','
           << format_double(p.rmse_db) << ',' << format_double(p.cos_est) << ','
           << p.n_trials << ',' << p.excluded_trials << '\n';
    }
}

void write_threshold_csv(std::ostream& os, const ThresholdTable& table) {
    os << "detector,pfa,n_trials,master_seed,threshold\n";
    for (const auto& [name, threshold] : table.entries) {
        os << name << ',' << format_double(table.pfa) << ',' << table.n_trials << ','
           << table.master_seed << ',' << format_double(threshold) << '\n';
    }
}

ThresholdTable read_threshold_csv(std::istream& is) {
    ThresholdTable table;
    std::string line;
    if (!std::getline(is, line) ||
        line != "detector,pfa,n_trials,master_seed,threshold") {
        throw Error("read_threshold_csv: bad or missing header");
    }
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string name, pfa_s, trials_s, seed_s, threshold_s;
        if (!std::getline(row, name, ',') || !std::getline(row, pfa_s, ',') ||
            !std::getline(row, trials_s, ',') || !std::getline(row, seed_s, ',') ||
            !std::getline(row, threshold_s)) {
            throw Error("read_threshold_csv: malformed row: " + line);
        }
        try {
            const double pfa = std::stod(pfa_s);
            const int n_trials = std::stoi(trials_s);
            const std::uint64_t seed = std::stoull(seed_s);
            if (first) {
                table.pfa = pfa;
                table.n_trials = n_trials;
                table.master_seed = seed;
                first = false;
            } else if (pfa != table.pfa || n_trials != table.n_trials ||
                       seed != table.master_seed) {
                throw Error("read_threshold_csv: inconsistent calibration metadata");
            }
            table.entries[name] = std::stod(threshold_s);
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw Error("read_threshold_csv: malformed row: " + line);
        }
    }
    if (table.entries.empty()) {
        throw Error("read_threshold_csv: no entries");
    }
    return table;
}

} // namespace lamdet
