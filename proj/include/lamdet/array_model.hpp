#pragma once

#include <vector>

#include "lamdet/errors.hpp"
#include "lamdet/types.hpp"

namespace lamdet {

struct ArrayGeometry {
    int n_elements;
    double spacing_over_wavelength; // d / lambda_0

    explicit ArrayGeometry(int n, double d_over_lambda = 0.5);
};

struct PointingState {
    double u_bar; // nominal look direction, directional cosine
    double alpha; // displacement bound, directional-cosine units

    PointingState(double u_bar_, double alpha_);
};

/// Banded symmetric Toeplitz coupling model of order P: unit diagonal and
/// complex coefficients c_1 .. c_{P-1} on the off-diagonals. P = 1 means no
/// coupling.
class CouplingProfile {
public:
    CouplingProfile(int order, std::vector<Complex> coeffs);

    int order() const { return order_; }
    const std::vector<Complex>& coeffs() const { return coeffs_; }

private:
    int order_;
    std::vector<Complex> coeffs_;
};

/// Linearized-manifold basis around the look direction: columns of d_tilde
/// are D_m p(u_bar), columns of d_dot are D_m pdot(u_bar).
struct ManifoldBasis {
    CMat d_tilde; // N x P
    CMat d_dot;   // N x P
    PointingState pointing;
    ArrayGeometry geometry;
};

CVec steering(const ArrayGeometry& geometry, double u);
CVec steering_derivative(const ArrayGeometry& geometry, double u);

/// N x N coupling matrix for the profile; plain symmetric (no conjugation),
/// entry (k, l) = c_|k-l| inside the band.
CMat coupling_matrix(const CouplingProfile& profile, int n);

/// N x N matrix with ones on the m-th upper and lower diagonals (m = 0 gives
/// the identity).
RMat selection_matrix(int m, int n);

/// [x, D_1 x, ..., D_{order-1} x] without forming the selection matrices.
CMat selection_stack(const CVec& x, int order);

ManifoldBasis manifold_basis(const ArrayGeometry& geometry,
                             const PointingState& pointing, int order);

/// H(delta_u) = d_tilde + delta_u * d_dot. delta_u is an expansion variable,
/// not a physical direction, so it is unconstrained here.
CMat h_of_delta(const ManifoldBasis& basis, double delta_u);

/// |v1' v2| / (||v1|| ||v2||) in [0, 1].
double cosine_similarity(const CVec& v1, const CVec& v2);

struct PeakScanResult {
    double peak_theta_deg = 0.0;
    double displacement_deg = 0.0;          // peak angle minus asin(u0)
    std::vector<double> theta_deg;          // scanned grid
    std::vector<double> cos_values;         // cos_s(u; u0) on the grid
};

/// Scans the similarity between the coupled steering vector at u0 and the
/// ideal one over a grid of angles (degrees) covering u0's neighborhood, and
/// reports the peak and its offset from the true direction.
PeakScanResult peak_mismatch_scan(const ArrayGeometry& geometry,
                                  const CouplingProfile& profile, double u0,
                                  const std::vector<double>& theta_grid_deg);

/// True iff order <= N/2 and [d_tilde, d_dot] has full column rank.
bool check_identifiability(const ManifoldBasis& basis);

} // namespace lamdet
