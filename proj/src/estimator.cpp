#include "lamdet/estimator.hpp"

#include <algorithm>
#include <cmath>

namespace lamdet {

namespace {

void validate_config(const MMConfig& config) {
    if (!(config.epsilon > 0.0)) {
        throw std::invalid_argument("MMConfig: epsilon must be positive");
    }
    if (config.max_iters < 1) {
        throw std::invalid_argument("MMConfig: max_iters must be >= 1");
    }
    if (!(config.alpha > 0.0)) {
        throw std::invalid_argument("MMConfig: alpha must be positive");
    }
}

Eigen::LLT<CMat> gram_factor(const CMat& h, const char* who) {
    const CMat a = h.adjoint() * h;
    Eigen::LLT<CMat> llt(a);
    if (llt.info() != Eigen::Success) {
        throw RankDeficient(std::string(who) + ": H_w is rank deficient");
    }
    return llt;
}

} // namespace

WhitenedData whiten(const SnapshotSet& snapshots, const ManifoldBasis& basis) {
    const Eigen::Index n = snapshots.primary.size();
    if (snapshots.secondary.rows() != n) {
        throw std::invalid_argument("whiten: secondary row count mismatch");
    }
    if (snapshots.secondary.cols() < n) {
        throw InsufficientSecondaryData("whiten: K < N");
    }
    const CMat scatter = snapshots.secondary * snapshots.secondary.adjoint();
    return whiten_with_scatter(scatter, snapshots.primary, basis);
}

WhitenedData whiten_with_scatter(const CMat& scatter, const CVec& r,
                                 const ManifoldBasis& basis) {
    // Decompose the trace-normalized scatter so a common scaling of the data
    // reaches the eigensolver as (nearly) the same floating-point matrix;
    // the scalar then cancels coherently in every downstream statistic.
    const double scale = scatter.real().trace() / static_cast<double>(scatter.rows());
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw SingularSampleCovariance("whiten: scatter matrix has nonpositive trace");
    }
    CMat s_inv_sqrt;
    try {
        s_inv_sqrt = hermitian_inv_sqrt(HermitianPD(CMat(scatter / scale)));
        s_inv_sqrt /= std::sqrt(scale);
    } catch (const NotPositiveDefinite& e) {
        throw SingularSampleCovariance(std::string("whiten: ") + e.what());
    }
    WhitenedData w;
    w.r_w = s_inv_sqrt * r;
    w.d_tilde_w = s_inv_sqrt * basis.d_tilde;
    w.d_dot_w = s_inv_sqrt * basis.d_dot;
    w.s_inv_sqrt = std::move(s_inv_sqrt);
    w.r_norm_sq = w.r_w.squaredNorm();
    return w;
}

WhitenedData rewhiten(const WhitenedData& w, const ManifoldBasis& basis) {
    WhitenedData out;
    out.r_w = w.r_w;
    out.d_tilde_w = w.s_inv_sqrt * basis.d_tilde;
    out.d_dot_w = w.s_inv_sqrt * basis.d_dot;
    out.s_inv_sqrt = w.s_inv_sqrt;
    out.r_norm_sq = w.r_norm_sq;
    return out;
}

double projection_objective(const WhitenedData& w, double delta_u) {
    const CMat h = w.d_tilde_w + delta_u * w.d_dot_w;
    const auto llt = gram_factor(h, "projection_objective");
    const CVec y = h.adjoint() * w.r_w;
    return y.dot(llt.solve(y)).real();
}

MMStepResult mm_step(const WhitenedData& w, double delta_u_prev, double alpha) {
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("mm_step: alpha must be positive");
    }
    const CMat h0 = w.d_tilde_w + delta_u_prev * w.d_dot_w;
    const auto llt = gram_factor(h0, "mm_step");
    const CVec y0 = h0.adjoint() * w.r_w;
    const CVec x0 = llt.solve(y0); // A0^{-1} y0

    // rho = tr{grad_A f . Dd_w' Dd_w} with grad_A f = -x0 x0'; real and <= 0.
    const CVec dd_x0 = w.d_dot_w * x0;
    const double rho = -dd_x0.squaredNorm();

    // zeta = 2 Re{x0' Dd_w' r_w} + tr{grad_A f (Dd_w' Dt_w + Dt_w' Dd_w)}.
    const CVec dt_x0 = w.d_tilde_w * x0;
    const double zeta = 2.0 * (w.d_dot_w.adjoint() * w.r_w).dot(x0).real() -
                        2.0 * dd_x0.dot(dt_x0).real();

    MMStepResult step;
    step.rho = rho;
    step.zeta = zeta;
    if (rho < 0.0) {
        step.delta_u_next = std::clamp(-zeta / (2.0 * rho), -alpha, alpha);
    } else {
        // Degenerate surrogate (projected data is zero): pick the better
        // boundary point, ties toward -alpha.
        step.delta_u_next = zeta > 0.0 ? alpha : -alpha;
    }
    return step;
}

DisplacementEstimate estimate_displacement(const WhitenedData& w,
                                           const MMConfig& config) {
    validate_config(config);
    DisplacementEstimate est;
    double delta_u = 0.0;
    double f_prev = projection_objective(w, delta_u);
    est.objective_trace.push_back(f_prev);
    for (int h = 1; h <= config.max_iters; ++h) {
        const MMStepResult step = mm_step(w, delta_u, config.alpha);
        delta_u = step.delta_u_next;
        const double f = projection_objective(w, delta_u);
        est.objective_trace.push_back(f);
        est.iterations = h;
        if (std::abs(f - f_prev) <= config.epsilon * std::abs(f)) {
            est.converged = true;
            f_prev = f;
            break;
        }
        f_prev = f;
    }
    est.delta_u_hat = delta_u;
    est.b_hat = estimate_b(w, delta_u);
    return est;
}

CVec estimate_b(const WhitenedData& w, double delta_u) {
    const CMat h = w.d_tilde_w + delta_u * w.d_dot_w;
    return least_squares_projection(h, w.r_w).coeffs;
}

CouplingEstimate coupling_from_b(const CVec& b_hat) {
    if (b_hat.size() < 1) {
        throw std::invalid_argument("coupling_from_b: empty vector");
    }
    const double norm = b_hat.norm();
    if (norm == 0.0 || std::abs(b_hat(0)) < 1e-10 * norm) {
        throw DegenerateAmplitude("coupling_from_b: |b(1)| below threshold");
    }
    CouplingEstimate out;
    out.a_hat = b_hat(0);
    out.c_hat.resize(b_hat.size() - 1);
    for (Eigen::Index i = 1; i < b_hat.size(); ++i) {
        out.c_hat[i - 1] = b_hat(i) / b_hat(0);
    }
    return out;
}

TwoStageEstimate two_stage_refine(const SnapshotSet& snapshots,
                                  const ArrayGeometry& geometry,
                                  const PointingState& pointing, int order,
                                  const MMConfig& config) {
    validate_config(config);
    const ManifoldBasis basis1 = manifold_basis(geometry, pointing, order);
    const WhitenedData w1 = whiten(snapshots, basis1);

    TwoStageEstimate out;
    out.first = estimate_displacement(w1, config);

    const double alpha2 = config.stage2_alpha > 0.0 ? config.stage2_alpha : config.alpha;
    const PointingState pointing2(pointing.u_bar + out.first.delta_u_hat, alpha2);
    const ManifoldBasis basis2 = manifold_basis(geometry, pointing2, order);
    const WhitenedData w2 = rewhiten(w1, basis2);

    MMConfig config2 = config;
    config2.alpha = alpha2;
    out.second = estimate_displacement(w2, config2);

    const double bound = 2.0 * config.alpha;
    out.total_delta_u = std::clamp(out.first.delta_u_hat + out.second.delta_u_hat,
                                   -bound, bound);
    return out;
}

} // namespace lamdet
