#include "lamdet/crb.hpp"

#include <Eigen/LU>

namespace lamdet {

namespace {

// F = 2 Re{J' M^{-1} J} with J = [deriv b, base, j base].
FimPartition build_fim(const HermitianPD& m, const CMat& deriv, const CMat& base,
                       const CVec& b) {
    if (b.size() != base.cols()) {
        throw std::invalid_argument("fim: b length does not match the basis order");
    }
    if (b.norm() == 0.0) {
        throw DegenerateVector("fim: b must be nonzero");
    }
    const Eigen::Index p = base.cols();
    CMat j(base.rows(), 2 * p + 1);
    j.col(0) = deriv * b;
    j.middleCols(1, p) = base;
    j.middleCols(1 + p, p) = Complex(0.0, 1.0) * base;

    Eigen::LLT<CMat> llt(m.matrix());
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("fim: covariance not positive definite");
    }
    const RMat f = 2.0 * (j.adjoint() * llt.solve(j)).real();

    FimPartition out;
    out.f_uu = f(0, 0);
    out.f_ub = f.row(0).tail(2 * p);
    out.f_bb = f.bottomRightCorner(2 * p, 2 * p);
    return out;
}

CrbResult schur_bound(const FimPartition& fim, CrbModel model) {
    Eigen::FullPivLU<RMat> lu(fim.f_bb);
    if (!lu.isInvertible()) {
        throw SingularFisherBlock("crb: F_bb is singular");
    }
    const double schur =
        fim.f_uu - (fim.f_ub * lu.solve(fim.f_ub.transpose()))(0, 0);
    if (!(schur > 0.0) || !std::isfinite(schur)) {
        throw SingularFisherBlock("crb: nonpositive Schur complement");
    }
    return CrbResult{1.0 / schur, model};
}

} // namespace

RMat FimPartition::full() const {
    const Eigen::Index q = f_ub.cols();
    RMat f(q + 1, q + 1);
    f(0, 0) = f_uu;
    f.row(0).tail(q) = f_ub;
    f.col(0).tail(q) = f_ub.transpose();
    f.bottomRightCorner(q, q) = f_bb;
    return f;
}

FimPartition fim_actual(const HermitianPD& m, double u0, const CVec& b,
                        const ArrayGeometry& geometry, int order) {
    const CMat dcheck = selection_stack(steering(geometry, u0), order);
    const CMat dcheck_dot = selection_stack(steering_derivative(geometry, u0), order);
    return build_fim(m, dcheck_dot, dcheck, b);
}

FimPartition fim_linearized(const HermitianPD& m, double delta_u, const CVec& b,
                            const ManifoldBasis& basis) {
    const CMat h = basis.d_tilde + delta_u * basis.d_dot;
    return build_fim(m, basis.d_dot, h, b);
}

CrbResult crb_actual(const HermitianPD& m, double u0, const CVec& b,
                     const ArrayGeometry& geometry, int order) {
    return schur_bound(fim_actual(m, u0, b, geometry, order), CrbModel::Actual);
}

CrbResult crb_linearized(const HermitianPD& m, double delta_u, const CVec& b,
                         const ManifoldBasis& basis) {
    return schur_bound(fim_linearized(m, delta_u, b, basis), CrbModel::Linearized);
}

} // namespace lamdet
