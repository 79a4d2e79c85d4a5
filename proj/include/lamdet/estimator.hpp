#pragma once

#include <vector>

#include "lamdet/scenario.hpp"

namespace lamdet {

/// Primary data and manifold basis transformed by S^{-1/2}, where S is the
/// secondary-data scatter matrix.
struct WhitenedData {
    CVec r_w;
    CMat d_tilde_w;
    CMat d_dot_w;
    CMat s_inv_sqrt;
    double r_norm_sq = 0.0; // ||r_w||^2 = r' S^{-1} r
};

struct MMConfig {
    double epsilon = 1e-8;    // exit threshold, relative to the current objective
    int max_iters = 200;
    double alpha = 0.0;       // displacement bound; must be > 0
    double stage2_alpha = 0.0; // 0 = reuse alpha for the second stage
};

struct DisplacementEstimate {
    double delta_u_hat = 0.0;
    CVec b_hat;
    std::vector<double> objective_trace; // f at the initial point and each iterate
    int iterations = 0;
    bool converged = false;
};

struct MMStepResult {
    double delta_u_next = 0.0;
    double rho = 0.0;
    double zeta = 0.0;
};

struct TwoStageEstimate {
    DisplacementEstimate first;
    DisplacementEstimate second;
    double total_delta_u = 0.0;
};

struct CouplingEstimate {
    Complex a_hat{0.0, 0.0};
    std::vector<Complex> c_hat;
};

/// Quasi-whitens the primary vector and the basis by the Hermitian inverse
/// square root of S = sum_k r_k r_k'.
WhitenedData whiten(const SnapshotSet& snapshots, const ManifoldBasis& basis);

/// Whitening with an externally supplied scatter matrix.
WhitenedData whiten_with_scatter(const CMat& scatter, const CVec& r,
                                 const ManifoldBasis& basis);

/// Re-applies an existing whitening factor to a new basis (second stage).
WhitenedData rewhiten(const WhitenedData& w, const ManifoldBasis& basis);

/// Concentrated objective f(delta_u) = r_w' P_H(delta_u) r_w.
double projection_objective(const WhitenedData& w, double delta_u);

/// One minorize-maximize update of the displacement: quadratic surrogate
/// coefficients (rho, zeta) from the tangent plane of y' A^{-1} y, maximized
/// over [-alpha, alpha].
MMStepResult mm_step(const WhitenedData& w, double delta_u_prev, double alpha);

/// Iterates mm_step from zero until the objective stalls; the trace is
/// nondecreasing and the output stays within the bound.
DisplacementEstimate estimate_displacement(const WhitenedData& w,
                                           const MMConfig& config);

/// Least-squares coefficient vector at a fixed displacement.
CVec estimate_b(const WhitenedData& w, double delta_u);

/// Splits b into target amplitude and coupling coefficients, c_i =
/// b(i+1)/b(1).
CouplingEstimate coupling_from_b(const CVec& b_hat);

/// Stage 1 at u_bar, then re-linearization of the manifold around
/// u_bar + delta_u_hat and a second estimation pass; the reported total is
/// clamped to [-2 alpha, 2 alpha].
TwoStageEstimate two_stage_refine(const SnapshotSet& snapshots,
                                  const ArrayGeometry& geometry,
                                  const PointingState& pointing, int order,
                                  const MMConfig& config);

} // namespace lamdet
