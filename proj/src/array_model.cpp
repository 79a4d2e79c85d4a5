#include "lamdet/array_model.hpp"

#include <cmath>

#include "lamdet/numkernel.hpp"

namespace lamdet {

ArrayGeometry::ArrayGeometry(int n, double d_over_lambda)
    : n_elements(n), spacing_over_wavelength(d_over_lambda) {
    if (n < 2) {
        throw std::invalid_argument("ArrayGeometry: need at least 2 elements");
    }
    if (!(d_over_lambda > 0.0)) {
        throw std::invalid_argument("ArrayGeometry: spacing must be positive");
    }
}

PointingState::PointingState(double u_bar_, double alpha_)
    : u_bar(u_bar_), alpha(alpha_) {
    if (std::abs(u_bar) > 1.0) {
        throw OutOfVisibleRegion("PointingState: |u_bar| > 1");
    }
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("PointingState: alpha must be positive");
    }
}

CouplingProfile::CouplingProfile(int order, std::vector<Complex> coeffs)
    : order_(order), coeffs_(std::move(coeffs)) {
    if (order_ < 1) {
        throw std::invalid_argument("CouplingProfile: order must be >= 1");
    }
    if (static_cast<int>(coeffs_.size()) != order_ - 1) {
        throw std::invalid_argument("CouplingProfile: need order-1 coefficients");
    }
}

CVec steering(const ArrayGeometry& geometry, double u) {
    if (std::abs(u) > 1.0) {
        throw OutOfVisibleRegion("steering: |u| = " + std::to_string(std::abs(u)));
    }
    const int n = geometry.n_elements;
    const double phase_step = 2.0 * kPi * geometry.spacing_over_wavelength * u;
    CVec p(n);
    for (int k = 0; k < n; ++k) {
        p(k) = std::polar(1.0, phase_step * k);
    }
    return p;
}

CVec steering_derivative(const ArrayGeometry& geometry, double u) {
    const CVec p = steering(geometry, u);
    const int n = geometry.n_elements;
    const double factor = 2.0 * kPi * geometry.spacing_over_wavelength;
    CVec pdot(n);
    for (int k = 0; k < n; ++k) {
        pdot(k) = Complex(0.0, factor * k) * p(k);
    }
    return pdot;
}

CMat coupling_matrix(const CouplingProfile& profile, int n) {
    if (profile.order() > n) {
        throw OrderExceedsAperture("coupling_matrix: order exceeds array size");
    }
    CMat c = CMat::Identity(n, n);
    for (int m = 1; m < profile.order(); ++m) {
        const Complex cm = profile.coeffs()[m - 1];
        for (int k = 0; k + m < n; ++k) {
            c(k, k + m) = cm;
            c(k + m, k) = cm; // symmetric, not conjugate-symmetric
        }
    }
    return c;
}

RMat selection_matrix(int m, int n) {
    if (m < 0) {
        throw std::invalid_argument("selection_matrix: m must be >= 0");
    }
    if (m >= n) {
        throw OrderExceedsAperture("selection_matrix: m >= n");
    }
    if (m == 0) return RMat::Identity(n, n);
    RMat d = RMat::Zero(n, n);
    for (int k = 0; k + m < n; ++k) {
        d(k, k + m) = 1.0;
        d(k + m, k) = 1.0;
    }
    return d;
}

CMat selection_stack(const CVec& x, int order) {
    const int n = static_cast<int>(x.size());
    if (order < 1) {
        throw std::invalid_argument("selection_stack: order must be >= 1");
    }
    if (order > n) {
        throw OrderExceedsAperture("selection_stack: order exceeds vector length");
    }
    CMat stacked(n, order);
    stacked.col(0) = x;
    for (int m = 1; m < order; ++m) {
        // D_m x as shifted sums; cheaper and exact compared to forming D_m.
        for (int k = 0; k < n; ++k) {
            Complex t(0.0, 0.0);
            if (k - m >= 0) t += x(k - m);
            if (k + m < n) t += x(k + m);
            stacked(k, m) = t;
        }
    }
    return stacked;
}

ManifoldBasis manifold_basis(const ArrayGeometry& geometry,
                             const PointingState& pointing, int order) {
    if (order < 1) {
        throw std::invalid_argument("manifold_basis: order must be >= 1");
    }
    if (2 * order > geometry.n_elements) {
        throw IdentifiabilityViolation("manifold_basis: order exceeds N/2");
    }
    CMat d_tilde = selection_stack(steering(geometry, pointing.u_bar), order);
    CMat d_dot = selection_stack(steering_derivative(geometry, pointing.u_bar), order);
    return ManifoldBasis{std::move(d_tilde), std::move(d_dot), pointing, geometry};
}

CMat h_of_delta(const ManifoldBasis& basis, double delta_u) {
    return basis.d_tilde + delta_u * basis.d_dot;
}

double cosine_similarity(const CVec& v1, const CVec& v2) {
    const double n1 = v1.norm();
    const double n2 = v2.norm();
    if (n1 == 0.0 || n2 == 0.0) {
        throw DegenerateVector("cosine_similarity: zero vector");
    }
    return std::abs(v1.dot(v2)) / (n1 * n2);
}

PeakScanResult peak_mismatch_scan(const ArrayGeometry& geometry,
                                  const CouplingProfile& profile, double u0,
                                  const std::vector<double>& theta_grid_deg) {
    if (theta_grid_deg.empty()) {
        throw EmptyGrid("peak_mismatch_scan: empty grid");
    }
    const CMat c = coupling_matrix(profile, geometry.n_elements);
    const CVec pm0 = c * steering(geometry, u0);

    PeakScanResult out;
    out.theta_deg = theta_grid_deg;
    out.cos_values.reserve(theta_grid_deg.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < theta_grid_deg.size(); ++i) {
        const double u = u_from_deg(theta_grid_deg[i]);
        out.cos_values.push_back(cosine_similarity(pm0, steering(geometry, u)));
        if (out.cos_values[i] > out.cos_values[best]) best = i;
    }
    out.peak_theta_deg = theta_grid_deg[best];
    out.displacement_deg = out.peak_theta_deg - deg_from_u(u0);
    return out;
}

bool check_identifiability(const ManifoldBasis& basis) {
    const int order = static_cast<int>(basis.d_tilde.cols());
    if (2 * order > basis.geometry.n_elements) return false;
    CMat h1(basis.d_tilde.rows(), 2 * order);
    h1 << basis.d_tilde, basis.d_dot;
    return full_column_rank(h1);
}

} // namespace lamdet
