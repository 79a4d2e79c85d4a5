#pragma once

#include "lamdet/array_model.hpp"
#include "lamdet/numkernel.hpp"

namespace lamdet {

/// Fisher information for theta = [u, Re b, Im b], partitioned around the
/// angular entry.
struct FimPartition {
    double f_uu = 0.0;
    Eigen::RowVectorXd f_ub; // 1 x 2P
    RMat f_bb;               // 2P x 2P

    RMat full() const;
};

enum class CrbModel { Actual, Linearized };

struct CrbResult {
    double crb_value = 0.0; // directional-cosine^2 units
    CrbModel model = CrbModel::Actual;
};

/// Fisher information of the actual coupled model, mean Dcheck(u0) b; known
/// covariance m.
FimPartition fim_actual(const HermitianPD& m, double u0, const CVec& b,
                        const ArrayGeometry& geometry, int order);

/// Fisher information of the linearized model, mean (Dt + delta_u Dd) b.
FimPartition fim_linearized(const HermitianPD& m, double delta_u, const CVec& b,
                            const ManifoldBasis& basis);

/// Schur-complement bound [F_uu - F_ub F_bb^{-1} F_ub']^{-1} for both models.
CrbResult crb_actual(const HermitianPD& m, double u0, const CVec& b,
                     const ArrayGeometry& geometry, int order);
CrbResult crb_linearized(const HermitianPD& m, double delta_u, const CVec& b,
                         const ManifoldBasis& basis);

} // namespace lamdet
