#include "lamdet/selftest.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "lamdet/config.hpp"
#include "lamdet/rng.hpp"

namespace lamdet {

namespace {

CMat random_hpd(int n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    CMat g(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) g(i, k) = rng.next_complex_normal();
    return CMat(g * g.adjoint() + 0.1 * CMat::Identity(n, n));
}

CVec random_cvec(int n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    CVec v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.next_complex_normal();
    return v;
}

} // namespace

int run_selftest(std::ostream& os) {
    const ExperimentConfig config; // baseline scenario
    const HarnessSetup setup = make_setup(config);
    const ArrayGeometry& geometry = setup.env.geometry;
    const CouplingProfile& coupling = setup.env.coupling;
    const PointingState& pointing = setup.pointing;

    struct Check {
        std::string name;
        std::function<bool()> run;
    };
    std::vector<Check> checks;

    checks.push_back({"steering norm^2 equals N", [&] {
        const CVec p = steering(geometry, pointing.u_bar);
        return p.squaredNorm() == static_cast<double>(geometry.n_elements);
    }});

    checks.push_back({"steering derivative matches finite differences", [&] {
        const double u = 0.31;
        const double h = 1e-6;
        const CVec fd = (steering(geometry, u + h) - steering(geometry, u - h)) / (2.0 * h);
        const CVec an = steering_derivative(geometry, u);
        return (fd - an).norm() <= 1e-6 * an.norm();
    }});

    checks.push_back({"coupling matrix equals selection recomposition", [&] {
        CMat recomposed = CMat::Identity(geometry.n_elements, geometry.n_elements);
        for (int m = 1; m < coupling.order(); ++m) {
            recomposed += coupling.coeffs()[m - 1] *
                          selection_matrix(m, geometry.n_elements).cast<Complex>();
        }
        return (coupling_matrix(coupling, geometry.n_elements) - recomposed).norm() == 0.0;
    }});

    checks.push_back({"H(du) b factorization identity", [&] {
        const ManifoldBasis basis = manifold_basis(geometry, pointing, coupling.order());
        const CVec b = random_cvec(coupling.order(), 7);
        const double du = 0.021;
        CMat big = b(0) * CMat::Identity(geometry.n_elements, geometry.n_elements);
        for (int m = 1; m < coupling.order(); ++m) {
            big += b(m) * selection_matrix(m, geometry.n_elements).cast<Complex>();
        }
        const CVec pa = steering(geometry, pointing.u_bar) +
                        du * steering_derivative(geometry, pointing.u_bar);
        const CVec lhs = h_of_delta(basis, du) * b;
        return ((lhs - big * pa).cwiseAbs().maxCoeff()) < 1e-12;
    }});

    checks.push_back({"hermitian_inv_sqrt inverts its square", [&] {
        const HermitianPD a(random_hpd(8, 11));
        const CMat b = hermitian_inv_sqrt(a);
        const CMat id = b * a.matrix() * b;
        return (id - CMat::Identity(8, 8)).norm() < 1e-10;
    }});

    checks.push_back({"least-squares residual orthogonal to the basis", [&] {
        SplitMix64 rng(13);
        CMat h(8, 3);
        for (int i = 0; i < 8; ++i)
            for (int k = 0; k < 3; ++k) h(i, k) = rng.next_complex_normal();
        const CVec r = random_cvec(8, 17);
        const auto ls = least_squares_projection(h, r);
        return ((h.adjoint() * (r - h * ls.coeffs)).cwiseAbs().maxCoeff()) < 1e-10;
    }});

    checks.push_back({"baseline manifold is identifiable", [&] {
        return check_identifiability(manifold_basis(geometry, pointing, coupling.order()));
    }});

    checks.push_back({"covariance is Hermitian positive definite", [&] {
        const HermitianPD m = build_covariance(setup.env);
        Eigen::LLT<CMat> llt(m.matrix());
        return llt.info() == Eigen::Success;
    }});

    checks.push_back({"snapshot draws are seed-deterministic", [&] {
        const HermitianPD m = build_covariance(setup.env);
        const SnapshotSet a = draw_snapshots(m, std::nullopt, setup.env.k_secondary, 99);
        const SnapshotSet b = draw_snapshots(m, std::nullopt, setup.env.k_secondary, 99);
        return a.primary == b.primary && a.secondary == b.secondary;
    }});

    checks.push_back({"MM trace is nondecreasing and bounded", [&] {
        const HermitianPD m = build_covariance(setup.env);
        const CMat c = coupling_matrix(coupling, geometry.n_elements);
        const CVec p_m = c * steering(geometry, setup.truth.u0);
        const Complex a = amplitude_for_sinr(15.0, m, p_m);
        const SnapshotSet snaps =
            draw_snapshots(m, CVec(a * p_m), setup.env.k_secondary, 123);
        const ManifoldBasis basis = manifold_basis(geometry, pointing, coupling.order());
        const DisplacementEstimate est =
            estimate_displacement(whiten(snaps, basis), setup.mm);
        if (std::abs(est.delta_u_hat) > setup.mm.alpha) return false;
        for (std::size_t i = 1; i < est.objective_trace.size(); ++i) {
            if (est.objective_trace[i] <
                est.objective_trace[i - 1] * (1.0 - 1e-9) - 1e-12) {
                return false;
            }
        }
        return true;
    }});

    checks.push_back({"GLRT-LAM bounded by tau_P on 100 H0 draws", [&] {
        const HermitianPD m = build_covariance(setup.env);
        const CMat m_sqrt = hermitian_sqrt(m);
        const ManifoldBasis basis = manifold_basis(geometry, pointing, coupling.order());
        for (int t = 0; t < 100; ++t) {
            const SnapshotSet snaps = draw_snapshots_colored(
                m_sqrt, std::nullopt, setup.env.k_secondary, derive_seed(5, 5, t));
            const double stat = glrt_lam(snaps, basis, setup.mm).statistic;
            if (!(stat >= 1.0) || stat > tau_p_bound(snaps, basis)) return false;
        }
        return true;
    }});

    checks.push_back({"statistics invariant to common data scaling", [&] {
        const HermitianPD m = build_covariance(setup.env);
        const ManifoldBasis basis = manifold_basis(geometry, pointing, coupling.order());
        SnapshotSet snaps = draw_snapshots(m, std::nullopt, setup.env.k_secondary, 321);
        const double stat = glrt_lam(snaps, basis, setup.mm).statistic;
        const Complex scale(1.7, -0.4);
        snaps.primary *= scale;
        snaps.secondary *= scale;
        const double scaled = glrt_lam(snaps, basis, setup.mm).statistic;
        return std::abs(scaled - stat) <= 1e-9 * std::abs(stat);
    }});

    checks.push_back({"CRBs coincide at zero displacement", [&] {
        const HermitianPD m = build_covariance(setup.env);
        CVec b(coupling.order());
        b(0) = Complex(1.0, 0.0);
        for (int i = 1; i < coupling.order(); ++i) b(i) = coupling.coeffs()[i - 1];
        const ManifoldBasis basis = manifold_basis(geometry, pointing, coupling.order());
        const double actual = crb_actual(m, pointing.u_bar, b, geometry, coupling.order()).crb_value;
        const double lin = crb_linearized(m, 0.0, b, basis).crb_value;
        return std::abs(actual - lin) <= 1e-10 * actual;
    }});

    checks.push_back({"coupled steering similarity dips below 0.8", [&] {
        const CMat c = coupling_matrix(coupling, geometry.n_elements);
        double min_cos = 1.0;
        for (double theta = 30.0; theta <= 60.0; theta += 0.05) {
            const CVec p = steering(geometry, u_from_deg(theta));
            min_cos = std::min(min_cos, cosine_similarity(CVec(c * p), p));
        }
        return min_cos < 0.8;
    }});

    checks.push_back({"g transform ordering g_2 <= g_1", [&] {
        for (double x = 3.5; x <= 100.0; x += 1.3) {
            if (g_transform(2, x) > g_transform(1, x)) return false;
        }
        return true;
    }});

    int failures = 0;
    for (const Check& check : checks) {
        bool passed = false;
        std::string note;
        try {
            passed = check.run();
        } catch (const std::exception& e) {
            note = std::string(" (") + e.what() + ")";
        }
        os << (passed ? "ok   " : "FAIL ") << check.name << note << '\n';
        if (!passed) ++failures;
    }
    os << (failures == 0 ? "selftest passed" : "selftest FAILED") << " ("
       << checks.size() - failures << "/" << checks.size() << " checks)\n";
    return failures;
}

} // namespace lamdet
