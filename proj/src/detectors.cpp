#include "lamdet/detectors.hpp"

#include <algorithm>
#include <cmath>

namespace lamdet {

namespace {

double ratio_statistic(double r_norm_sq, double projection_energy) {
    return (1.0 + r_norm_sq) / (1.0 + r_norm_sq - projection_energy);
}

CMat dcheck_matrix(const ArrayGeometry& geometry, double u, int order) {
    return selection_stack(steering(geometry, u), order);
}

DetectionReport run_glrt_lam(const WhitenedData& w, const MMConfig& config) {
    DetectionReport report;
    const DisplacementEstimate est = estimate_displacement(w, config);
    const double energy = projection_objective(w, est.delta_u_hat);
    report.statistic = ratio_statistic(w.r_norm_sq, energy);
    report.delta_u_hat = est.delta_u_hat;
    report.b_hat = est.b_hat;
    return report;
}

struct MflrtOutcome {
    DetectionReport report;
    double selected_delta_u = 0.0;
};

MflrtOutcome run_mflrt(const WhitenedData& w_full, int n_bar, int k_secondary,
                       const MMConfig& config, const DetectorOptions& options) {
    MflrtOutcome out;
    DetectionReport& report = out.report;
    const double scale = 2.0 * (k_secondary + 1);
    double best_g = -1.0;
    for (int i = 1; i <= n_bar; ++i) {
        WhitenedData wi;
        wi.r_w = w_full.r_w;
        wi.d_tilde_w = w_full.d_tilde_w.leftCols(i);
        wi.d_dot_w = w_full.d_dot_w.leftCols(i);
        wi.s_inv_sqrt = w_full.s_inv_sqrt;
        wi.r_norm_sq = w_full.r_norm_sq;

        const DisplacementEstimate est = estimate_displacement(wi, config);
        const double energy = projection_objective(wi, est.delta_u_hat);
        const double ratio = ratio_statistic(wi.r_norm_sq, energy);
        const double l_g = options.mflrt_log_form ? scale * std::log(ratio)
                                                  : scale * ratio;
        report.order_statistics.push_back(l_g);
        const double g = g_transform(i, l_g);
        if (g > best_g) { // strict: ties keep the smallest order
            best_g = g;
            report.selected_order = i;
            report.delta_u_hat = est.delta_u_hat;
            report.b_hat = est.b_hat;
            out.selected_delta_u = est.delta_u_hat;
        }
    }
    report.statistic = best_g;
    return out;
}

} // namespace

DetectorKind parse_detector(const std::string& token, int default_order) {
    std::string name = token;
    int order = 0;
    if (const auto colon = token.find(':'); colon != std::string::npos) {
        name = token.substr(0, colon);
        try {
            std::size_t used = 0;
            order = std::stoi(token.substr(colon + 1), &used);
            if (used != token.size() - colon - 1) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw IncompleteSpecification("parse_detector: bad order in '" + token + "'");
        }
        if (order < 1) {
            throw IncompleteSpecification("parse_detector: order must be >= 1 in '" +
                                          token + "'");
        }
    }
    DetectorKind kind;
    if (name == "GLRT_LAM") kind.variant = DetectorVariant::GlrtLam;
    else if (name == "GLRT_LAM_2S") kind.variant = DetectorVariant::GlrtLam2S;
    else if (name == "MFLRT") kind.variant = DetectorVariant::Mflrt;
    else if (name == "MFLRT_2S") kind.variant = DetectorVariant::Mflrt2S;
    else if (name == "BEN_GLRT") kind.variant = DetectorVariant::BenGlrt;
    else if (name == "BEN_GLRT_NC") kind.variant = DetectorVariant::BenGlrtNc;
    else if (name == "BEN_GLRT_DOA") kind.variant = DetectorVariant::BenGlrtDoa;
    else if (name == "CLASSIC_GLRT") kind.variant = DetectorVariant::ClassicGlrt;
    else if (name == "SUBSPACE_SD") kind.variant = DetectorVariant::SubspaceSd;
    else throw IncompleteSpecification("parse_detector: unknown detector '" + name + "'");
    kind.order = order > 0 ? order : default_order;
    return kind;
}

std::string detector_name(const DetectorKind& kind) {
    switch (kind.variant) {
        case DetectorVariant::GlrtLam: return "GLRT_LAM";
        case DetectorVariant::GlrtLam2S: return "GLRT_LAM_2S";
        case DetectorVariant::Mflrt: return "MFLRT:" + std::to_string(kind.order);
        case DetectorVariant::Mflrt2S: return "MFLRT_2S:" + std::to_string(kind.order);
        case DetectorVariant::BenGlrt: return "BEN_GLRT";
        case DetectorVariant::BenGlrtNc: return "BEN_GLRT_NC";
        case DetectorVariant::BenGlrtDoa: return "BEN_GLRT_DOA";
        case DetectorVariant::ClassicGlrt: return "CLASSIC_GLRT";
        case DetectorVariant::SubspaceSd: return "SUBSPACE_SD";
    }
    return "UNKNOWN";
}

DetectionReport glrt_lam(const SnapshotSet& snapshots, const ManifoldBasis& basis,
                         const MMConfig& config) {
    return run_glrt_lam(whiten(snapshots, basis), config);
}

double tau_p_bound(const SnapshotSet& snapshots, const ManifoldBasis& basis) {
    const WhitenedData w = whiten(snapshots, basis);
    CMat h1(w.d_tilde_w.rows(), w.d_tilde_w.cols() + w.d_dot_w.cols());
    h1 << w.d_tilde_w, w.d_dot_w;
    const double energy = least_squares_projection(h1, w.r_w).projection_energy;
    return ratio_statistic(w.r_norm_sq, energy);
}

double g_transform(int i, double x) {
    if (i < 1) {
        throw std::invalid_argument("g_transform: i must be >= 1");
    }
    const double k = 2.0 * i + 1.0;
    if (x < k) return 0.0; // unit step inactive
    return x - k * (std::log(x / k) + 1.0);
}

DetectionReport mflrt(const SnapshotSet& snapshots, const ArrayGeometry& geometry,
                      const PointingState& pointing, int n_bar,
                      const MMConfig& config, const DetectorOptions& options) {
    if (n_bar < 1) {
        throw std::invalid_argument("mflrt: n_bar must be >= 1");
    }
    const ManifoldBasis basis = manifold_basis(geometry, pointing, n_bar);
    const WhitenedData w = whiten(snapshots, basis);
    const int k = static_cast<int>(snapshots.secondary.cols());
    return run_mflrt(w, n_bar, k, config, options).report;
}

double kelly_projection_statistic(const CVec& r, const CMat& secondary, const CMat& h) {
    const Eigen::Index n = secondary.rows();
    if (secondary.cols() < n) {
        throw SingularSampleCovariance("kelly_projection_statistic: K < N");
    }
    // S = R'R with R from the QR of the secondary-data adjoint; whitening
    // solves against R' directly. The mismatched statistics are tiny
    // cancellation-prone ratios, and this data-domain path keeps them
    // accurate to roughly machine precision over the whitened cosine.
    const Eigen::HouseholderQR<CMat> qr(secondary.adjoint());
    const CMat rfac =
        qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    if (rfac.diagonal().cwiseAbs().minCoeff() == 0.0) {
        throw SingularSampleCovariance("kelly_projection_statistic: singular scatter");
    }
    const auto lower = rfac.adjoint().triangularView<Eigen::Lower>();
    const CVec r_w = lower.solve(r);
    const CMat h_w = lower.solve(h);
    const CMat gram = h_w.adjoint() * h_w;
    Eigen::LLT<CMat> gram_llt(gram);
    if (gram_llt.info() != Eigen::Success) {
        throw RankDeficient("kelly_projection_statistic: projected basis rank deficient");
    }
    const CVec y = h_w.adjoint() * r_w;
    const double energy = y.dot(gram_llt.solve(y)).real();
    return energy / (1.0 + r_w.squaredNorm());
}

DetectionReport benchmark_statistic(const DetectorKind& kind,
                                    const SnapshotSet& snapshots,
                                    const ArrayGeometry& geometry,
                                    const PointingState& pointing,
                                    const BenchmarkInputs& inputs,
                                    const DetectorOptions& options) {
    const auto need_u0 = [&]() -> double {
        if (!inputs.u0) {
            throw IncompleteSpecification("benchmark_statistic: u0 required for " +
                                          detector_name(kind));
        }
        return *inputs.u0;
    };
    const auto need_coupling = [&]() -> const CouplingProfile& {
        if (!inputs.coupling) {
            throw IncompleteSpecification("benchmark_statistic: coupling required for " +
                                          detector_name(kind));
        }
        return *inputs.coupling;
    };

    DetectionReport report;
    switch (kind.variant) {
        case DetectorVariant::BenGlrt: {
            const CMat c = coupling_matrix(need_coupling(), geometry.n_elements);
            const CVec p_m = c * steering(geometry, need_u0());
            report.statistic = kelly_projection_statistic(snapshots.primary, snapshots.secondary, p_m);
            break;
        }
        case DetectorVariant::BenGlrtNc: {
            const CVec p = steering(geometry, need_u0());
            report.statistic = kelly_projection_statistic(snapshots.primary, snapshots.secondary, p);
            break;
        }
        case DetectorVariant::BenGlrtDoa: {
            const CMat dbar = dcheck_matrix(geometry, need_u0(), need_coupling().order());
            double stat = kelly_projection_statistic(snapshots.primary, snapshots.secondary, dbar);
            if (options.ben_doa_verbatim) {
                // Denominator 1 + ||r||^2 exactly as printed, instead of the
                // whitened norm used by every sibling statistic.
                const CMat scatter =
                    snapshots.secondary * snapshots.secondary.adjoint();
                const Eigen::LLT<CMat> llt(scatter);
                const double r_w_sq =
                    snapshots.primary.dot(llt.solve(snapshots.primary)).real();
                stat *= (1.0 + r_w_sq) / (1.0 + snapshots.primary.squaredNorm());
            }
            report.statistic = stat;
            break;
        }
        case DetectorVariant::ClassicGlrt: {
            const CVec p = steering(geometry, pointing.u_bar);
            report.statistic = kelly_projection_statistic(snapshots.primary, snapshots.secondary, p);
            break;
        }
        case DetectorVariant::SubspaceSd: {
            CMat h_sd(geometry.n_elements, 2);
            h_sd.col(0) = steering(geometry, pointing.u_bar);
            h_sd.col(1) = steering_derivative(geometry, pointing.u_bar);
            report.statistic = kelly_projection_statistic(snapshots.primary, snapshots.secondary, h_sd);
            break;
        }
        default:
            throw IncompleteSpecification("benchmark_statistic: " + detector_name(kind) +
                                          " is not a comparison detector");
    }
    return report;
}

DetectionReport two_stage_detect(const DetectorKind& kind,
                                 const SnapshotSet& snapshots,
                                 const ArrayGeometry& geometry,
                                 const PointingState& pointing,
                                 const MMConfig& config,
                                 const DetectorOptions& options) {
    const double alpha2 = config.stage2_alpha > 0.0 ? config.stage2_alpha : config.alpha;
    MMConfig config2 = config;
    config2.alpha = alpha2;
    const double bound = 2.0 * config.alpha;

    if (kind.variant == DetectorVariant::GlrtLam2S) {
        const ManifoldBasis basis1 = manifold_basis(geometry, pointing, kind.order);
        const WhitenedData w1 = whiten(snapshots, basis1);
        DetectionReport stage1 = run_glrt_lam(w1, config);

        const PointingState pointing2(pointing.u_bar + *stage1.delta_u_hat, alpha2);
        const ManifoldBasis basis2 = manifold_basis(geometry, pointing2, kind.order);
        DetectionReport report = run_glrt_lam(rewhiten(w1, basis2), config2);
        report.stage1_statistic = stage1.statistic;
        report.delta_u_hat =
            std::clamp(*stage1.delta_u_hat + *report.delta_u_hat, -bound, bound);
        return report;
    }
    if (kind.variant == DetectorVariant::Mflrt2S) {
        const ManifoldBasis basis1 = manifold_basis(geometry, pointing, kind.order);
        const WhitenedData w1 = whiten(snapshots, basis1);
        const int k = static_cast<int>(snapshots.secondary.cols());
        const MflrtOutcome stage1 = run_mflrt(w1, kind.order, k, config, options);

        // Re-linearize around the estimate of the stage-1 selected order.
        const PointingState pointing2(pointing.u_bar + stage1.selected_delta_u, alpha2);
        const ManifoldBasis basis2 = manifold_basis(geometry, pointing2, kind.order);
        MflrtOutcome stage2 = run_mflrt(rewhiten(w1, basis2), kind.order, k, config2, options);

        DetectionReport report = std::move(stage2.report);
        report.stage1_statistic = stage1.report.statistic;
        report.stage1_selected_order = stage1.report.selected_order;
        report.delta_u_hat =
            std::clamp(stage1.selected_delta_u + stage2.selected_delta_u, -bound, bound);
        return report;
    }
    throw IncompleteSpecification("two_stage_detect: " + detector_name(kind) +
                                  " is not a two-stage detector");
}

double decision_statistic(const DetectionReport& report) {
    return report.stage1_statistic.value_or(report.statistic);
}

void apply_threshold(DetectionReport& report, double threshold) {
    report.decided_h1 = decision_statistic(report) > threshold;
}

DetectorKind decision_kind(const DetectorKind& kind) {
    if (kind.variant == DetectorVariant::GlrtLam2S) {
        return DetectorKind{DetectorVariant::GlrtLam, kind.order};
    }
    if (kind.variant == DetectorVariant::Mflrt2S) {
        return DetectorKind{DetectorVariant::Mflrt, kind.order};
    }
    return kind;
}

DetectionReport evaluate_detector(const DetectorKind& kind,
                                  const SnapshotSet& snapshots,
                                  const DetectorContext& ctx) {
    switch (kind.variant) {
        case DetectorVariant::GlrtLam: {
            const ManifoldBasis basis =
                manifold_basis(ctx.geometry, ctx.pointing, kind.order);
            return glrt_lam(snapshots, basis, ctx.mm);
        }
        case DetectorVariant::Mflrt:
            return mflrt(snapshots, ctx.geometry, ctx.pointing, kind.order, ctx.mm,
                         ctx.options);
        case DetectorVariant::GlrtLam2S:
        case DetectorVariant::Mflrt2S:
            return two_stage_detect(kind, snapshots, ctx.geometry, ctx.pointing,
                                    ctx.mm, ctx.options);
        default:
            return benchmark_statistic(kind, snapshots, ctx.geometry, ctx.pointing,
                                       BenchmarkInputs{ctx.u0, ctx.true_coupling},
                                       ctx.options);
    }
}

} // namespace lamdet
