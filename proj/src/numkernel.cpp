#include "lamdet/numkernel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace lamdet {

namespace {

constexpr double kCondLimit = 1e12;

} // namespace

HermitianPD::HermitianPD(CMat m) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw std::invalid_argument("HermitianPD: matrix must be square and nonempty");
    }
    const double scale = m.norm();
    const double asym = (m - m.adjoint()).norm();
    if (scale > 0.0 && asym > 1e-12 * scale) {
        throw std::invalid_argument("HermitianPD: input is not conjugate-symmetric");
    }
    m_ = 0.5 * (m + m.adjoint().eval());
}

namespace {

// Shared eigendecomposition path for the two matrix-function kernels.
Eigen::SelfAdjointEigenSolver<CMat> decompose(const HermitianPD& a, const char* who) {
    Eigen::SelfAdjointEigenSolver<CMat> eig(a.matrix());
    if (eig.info() != Eigen::Success) {
        throw Error(std::string(who) + ": eigendecomposition failed");
    }
    return eig;
}

} // namespace

CMat hermitian_inv_sqrt(const HermitianPD& a) {
    auto eig = decompose(a, "hermitian_inv_sqrt");
    const RVec& lambda = eig.eigenvalues();
    const double lmax = lambda(lambda.size() - 1);
    if (lambda(0) <= 1e-13 * std::max(lmax, 0.0)) {
        throw NotPositiveDefinite("hermitian_inv_sqrt: smallest eigenvalue " +
                                  std::to_string(lambda(0)) + " is not positive");
    }
    const CMat b = eig.eigenvectors() *
                   lambda.cwiseSqrt().cwiseInverse().asDiagonal() *
                   eig.eigenvectors().adjoint();
    return 0.5 * (b + b.adjoint().eval());
}

CMat hermitian_sqrt(const HermitianPD& a) {
    auto eig = decompose(a, "hermitian_sqrt");
    const RVec clamped = eig.eigenvalues().cwiseMax(0.0);
    const CMat b = eig.eigenvectors() * clamped.cwiseSqrt().asDiagonal() *
                   eig.eigenvectors().adjoint();
    return 0.5 * (b + b.adjoint().eval());
}

LeastSquaresResult least_squares_projection(const CMat& h, const CVec& r) {
    if (h.rows() != r.size()) {
        throw std::invalid_argument("least_squares_projection: size mismatch");
    }
    if (h.rows() < h.cols()) {
        throw RankDeficient("least_squares_projection: more columns than rows");
    }
    Eigen::ColPivHouseholderQR<CMat> qr(h);
    const auto rdiag = qr.matrixR().diagonal().cwiseAbs().eval();
    const double rmax = rdiag.maxCoeff();
    const double rmin = rdiag.minCoeff();
    if (!(rmin > 0.0) || rmax / rmin > kCondLimit) {
        throw RankDeficient("least_squares_projection: condition estimate above 1e12");
    }
    LeastSquaresResult out;
    out.coeffs = qr.solve(r);
    out.projection_energy = (h * out.coeffs).squaredNorm();
    return out;
}

bool full_column_rank(const CMat& h) {
    if (h.cols() == 0) return false;
    if (h.rows() < h.cols()) return false;
    Eigen::JacobiSVD<CMat> svd(h);
    const RVec& sv = svd.singularValues();
    const double tol =
        static_cast<double>(std::max(h.rows(), h.cols())) * sv(0) * 1e-12;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol) ++rank;
    }
    return rank == h.cols();
}

} // namespace lamdet
