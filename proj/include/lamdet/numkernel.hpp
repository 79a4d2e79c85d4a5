#pragma once

#include "lamdet/errors.hpp"
#include "lamdet/types.hpp"

namespace lamdet {

/// Hermitian positive definite matrix. Construction verifies conjugate
/// symmetry to 1e-12 relative and stores the exactly symmetrized matrix;
/// positive definiteness is checked where it is consumed.
class HermitianPD {
public:
    explicit HermitianPD(CMat m);

    const CMat& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

private:
    CMat m_;
};

struct LeastSquaresResult {
    CVec coeffs;                    // (h'h)^{-1} h' r
    double projection_energy = 0.0; // r' P_h r
};

/// Unique Hermitian PD inverse square root B with B a B = I.
CMat hermitian_inv_sqrt(const HermitianPD& a);

/// Hermitian PSD square root (eigenvalues clamped at zero).
CMat hermitian_sqrt(const HermitianPD& a);

/// Least-squares coefficients and projection energy of r onto the column
/// span of h. Throws RankDeficient when the condition estimate of h exceeds
/// 1e12.
LeastSquaresResult least_squares_projection(const CMat& h, const CVec& r);

/// Numerical full-column-rank test: singular values above
/// max_dim * sigma_max * 1e-12 must equal the column count.
bool full_column_rank(const CMat& h);

} // namespace lamdet
