#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lamdet/estimator.hpp"

namespace lamdet {

enum class DetectorVariant {
    GlrtLam,
    GlrtLam2S,
    Mflrt,
    Mflrt2S,
    BenGlrt,     // known DOA, known coupling
    BenGlrtNc,   // known DOA, ideal manifold
    BenGlrtDoa,  // known DOA, estimated coupling
    ClassicGlrt, // nominal pointing, ideal manifold
    SubspaceSd,  // unconstrained [p, pdot] subspace
};

struct DetectorKind {
    DetectorVariant variant = DetectorVariant::GlrtLam;
    int order = 0; // P for the GLRT-LAM family, max order for the MFLRT family
};

/// Parses tokens like "GLRT_LAM", "MFLRT:8", "GLRT_LAM_2S:3", "BEN_GLRT".
DetectorKind parse_detector(const std::string& token, int default_order);
std::string detector_name(const DetectorKind& kind);

struct DetectorOptions {
    // MFLRT input scale: 2(K+1) ln(ratio) by default (the generalized
    // log-likelihood-ratio scale the penalized transform expects; the plain
    // 2(K+1) ratio variant saturates the order selection at n_bar for
    // strong targets). Set false for the ratio variant.
    bool mflrt_log_form = true;
    bool ben_doa_verbatim = false;     // denominator 1 + ||r||^2 unwhitened
};

struct DetectionReport {
    double statistic = 0.0;
    std::optional<double> stage1_statistic; // two-stage variants only
    std::optional<double> delta_u_hat;      // total displacement for two-stage
    std::optional<CVec> b_hat;
    std::optional<int> selected_order;              // MFLRT only
    std::optional<int> stage1_selected_order;       // MFLRT 2S only
    std::vector<double> order_statistics;           // MFLRT per-order l_G
    std::optional<bool> decided_h1;                 // set by the harness
};

/// GLRT with the linearized coupled manifold: (1 + ||r_w||^2) /
/// (1 + ||r_w||^2 - r_w' P_H(du_hat) r_w), always >= 1.
DetectionReport glrt_lam(const SnapshotSet& snapshots, const ManifoldBasis& basis,
                         const MMConfig& config);

/// CFAR majorant using the unconstrained projector onto [Dt_w, Dd_w].
double tau_p_bound(const SnapshotSet& snapshots, const ManifoldBasis& basis);

/// Penalized transform g_i(x) = [x - (2i+1)(ln(x/(2i+1)) + 1)] step(x/(2i+1) - 1).
double g_transform(int i, double x);

/// Multifamily LRT over nested model orders 1..n_bar; reports the maximizing
/// order, its displacement estimate, and the per-order statistics.
DetectionReport mflrt(const SnapshotSet& snapshots, const ArrayGeometry& geometry,
                      const PointingState& pointing, int n_bar,
                      const MMConfig& config, const DetectorOptions& options = {});

struct BenchmarkInputs {
    std::optional<double> u0;                 // known target DOA
    std::optional<CouplingProfile> coupling;  // known coupling (or its order)
};

/// Comparison detectors: Kelly-form projection statistics in [0, 1).
DetectionReport benchmark_statistic(const DetectorKind& kind,
                                    const SnapshotSet& snapshots,
                                    const ArrayGeometry& geometry,
                                    const PointingState& pointing,
                                    const BenchmarkInputs& inputs,
                                    const DetectorOptions& options = {});

/// Two-stage wrappers: stage-1 statistic decides detection, stage 2
/// re-linearizes around the stage-1 estimate and recomputes statistic and
/// displacement (reported statistic is the stage-2 one).
DetectionReport two_stage_detect(const DetectorKind& kind,
                                 const SnapshotSet& snapshots,
                                 const ArrayGeometry& geometry,
                                 const PointingState& pointing,
                                 const MMConfig& config,
                                 const DetectorOptions& options = {});

/// r_w' P_{H_w} r_w / (1 + ||r_w||^2), whitening by the triangular factor of
/// the secondary-data QR (S = R'R is never formed, keeping small whitened
/// components at full relative accuracy); shared core of every comparison
/// detector.
double kelly_projection_statistic(const CVec& r, const CMat& secondary, const CMat& h);

/// Everything the dispatching evaluator needs besides the snapshots.
struct DetectorContext {
    ArrayGeometry geometry;
    PointingState pointing;
    CouplingProfile true_coupling; // known coupling for the benchmarks
    double u0 = 0.0;               // known DOA for the benchmarks
    MMConfig mm;
    DetectorOptions options;
};

DetectionReport evaluate_detector(const DetectorKind& kind,
                                  const SnapshotSet& snapshots,
                                  const DetectorContext& ctx);

/// Kind whose statistic drives the detection decision: the two-stage
/// variants decide on their first pass.
DetectorKind decision_kind(const DetectorKind& kind);

/// Statistic the threshold is compared against (stage 1 for the two-stage
/// variants).
double decision_statistic(const DetectionReport& report);

/// Sets decided_h1 by comparing the decision statistic with a calibrated
/// threshold.
void apply_threshold(DetectionReport& report, double threshold);

} // namespace lamdet
