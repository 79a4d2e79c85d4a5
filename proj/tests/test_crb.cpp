#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "test_support.hpp"

using namespace lamdet;

namespace {

CVec baseline_b(double amplitude = 1.0) {
    CVec b(3);
    b << Complex(amplitude, 0.0), Complex(0.7 * amplitude, 0.0),
        Complex(0.4 * amplitude, 0.0);
    return b;
}

// Finite-difference Fisher oracle: numerical Jacobian of the mean
// Dcheck(u0) b over theta = [u0, Re b, Im b].
RMat fd_fim_actual(const HermitianPD& m, double u0, const CVec& b,
                   const ArrayGeometry& geometry, int order) {
    const int p = order;
    const auto mean = [&](double u, const CVec& bv) -> CVec {
        return selection_stack(steering(geometry, u), p) * bv;
    };
    const double h = 1e-5;
    CMat jac(geometry.n_elements, 2 * p + 1);
    jac.col(0) = (mean(u0 + h, b) - mean(u0 - h, b)) / (2.0 * h);
    for (int i = 0; i < p; ++i) {
        CVec bp = b, bm = b;
        bp(i) += h;
        bm(i) -= h;
        jac.col(1 + i) = (mean(u0, bp) - mean(u0, bm)) / (2.0 * h);
        bp = b;
        bm = b;
        bp(i) += Complex(0.0, h);
        bm(i) -= Complex(0.0, h);
        jac.col(1 + p + i) = (mean(u0, bp) - mean(u0, bm)) / (2.0 * h);
    }
    const Eigen::LLT<CMat> llt(m.matrix());
    return 2.0 * (jac.adjoint() * llt.solve(jac)).real();
}

} // namespace

TEST_SUITE_BEGIN("crb");

TEST_CASE("scaling the covariance scales the bound") {
    const auto& bl = testbed::baseline();
    const CVec b = baseline_b();
    const double base =
        crb_actual(bl.m, bl.setup.truth.u0, b, bl.geometry(), 3).crb_value;
    const HermitianPD scaled(CMat(3.7 * bl.m.matrix()));
    const double scaled_crb =
        crb_actual(scaled, bl.setup.truth.u0, b, bl.geometry(), 3).crb_value;
    CHECK(scaled_crb == doctest::Approx(3.7 * base).epsilon(1e-12));
}

TEST_CASE("rank-one closed form at white noise") {
    const ArrayGeometry geometry(16);
    const HermitianPD m(CMat::Identity(16, 16));
    const double u0 = 0.31;
    const Complex a(1.3, -0.2);
    CVec b(1);
    b << a;
    const CVec p = steering(geometry, u0);
    const CVec pdot = steering_derivative(geometry, u0);
    const double expected =
        1.0 / (2.0 * std::norm(a) *
               (pdot.squaredNorm() - std::norm(pdot.dot(p)) / 16.0));
    const double computed = crb_actual(m, u0, b, geometry, 1).crb_value;
    CHECK(computed == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("Slepian-Bangs FIM matches the finite-difference oracle") {
    const auto& bl = testbed::baseline();
    const CVec b = baseline_b(0.8);
    const RMat analytic =
        fim_actual(bl.m, bl.setup.truth.u0, b, bl.geometry(), 3).full();
    const RMat numeric =
        fd_fim_actual(bl.m, bl.setup.truth.u0, b, bl.geometry(), 3);
    CHECK((analytic - numeric).norm() <= 1e-4 * analytic.norm());
}

TEST_CASE("linearized and actual bounds coincide at zero displacement") {
    const auto& bl = testbed::baseline();
    const CVec b = baseline_b();
    const double actual =
        crb_actual(bl.m, bl.pointing().u_bar, b, bl.geometry(), 3).crb_value;
    const double lin = crb_linearized(bl.m, 0.0, b, bl.basis()).crb_value;
    CHECK(std::abs(lin - actual) <= 1e-10 * actual);
}

TEST_CASE("model gap at the baseline displacement is a few dB") {
    const auto& bl = testbed::baseline();
    const CVec b = baseline_b();
    const double actual =
        crb_actual(bl.m, bl.setup.truth.u0, b, bl.geometry(), 3).crb_value;
    const double lin =
        crb_linearized(bl.m, bl.setup.truth.delta_u, b, bl.basis()).crb_value;
    CHECK(lin > actual);
    CHECK(lin < actual * std::pow(10.0, 0.4));
}

TEST_CASE("bound is invariant to the amplitude phase") {
    const auto& bl = testbed::baseline();
    const CVec b = baseline_b();
    const CVec rotated = std::polar(1.0, 1.1) * b;
    const double base =
        crb_actual(bl.m, bl.setup.truth.u0, b, bl.geometry(), 3).crb_value;
    const double turned =
        crb_actual(bl.m, bl.setup.truth.u0, rotated, bl.geometry(), 3).crb_value;
    CHECK(turned == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("scaling b by kappa scales the bound by 1/kappa^2") {
    const auto& bl = testbed::baseline();
    const double base =
        crb_linearized(bl.m, 0.0349, baseline_b(), bl.basis()).crb_value;
    const double scaled =
        crb_linearized(bl.m, 0.0349, baseline_b(2.0), bl.basis()).crb_value;
    CHECK(scaled == doctest::Approx(base / 4.0).epsilon(1e-10));
}

TEST_CASE("full FIM is positive semidefinite up to roundoff") {
    const auto& bl = testbed::baseline();
    const RMat f = fim_actual(bl.m, bl.setup.truth.u0, baseline_b(),
                              bl.geometry(), 3)
                       .full();
    Eigen::SelfAdjointEigenSolver<RMat> eig(f);
    CHECK(eig.eigenvalues()(0) >= -1e-10 * f.norm());
}

TEST_CASE("Schur complement equals the (1,1) entry of the inverse FIM") {
    const auto& bl = testbed::baseline();
    const FimPartition fim =
        fim_actual(bl.m, bl.setup.truth.u0, baseline_b(), bl.geometry(), 3);
    const double crb =
        crb_actual(bl.m, bl.setup.truth.u0, baseline_b(), bl.geometry(), 3).crb_value;
    const RMat inverse = fim.full().inverse();
    CHECK(crb == doctest::Approx(inverse(0, 0)).epsilon(1e-10));
}

TEST_CASE("degenerate Fisher blocks are rejected") {
    const auto& bl = testbed::baseline();
    CHECK_THROWS_AS(
        crb_actual(bl.m, bl.setup.truth.u0, CVec::Zero(3), bl.geometry(), 3),
        DegenerateVector);
}

TEST_SUITE_END();
