#include <doctest.h>

#include "test_support.hpp"

using namespace lamdet;
using testbed::random_cmat;
using testbed::random_cvec;
using testbed::random_hpd;

TEST_SUITE_BEGIN("numkernel");

TEST_CASE("hermitian_inv_sqrt of the identity is the identity") {
    const HermitianPD a(CMat::Identity(4, 4));
    CHECK((hermitian_inv_sqrt(a) - CMat::Identity(4, 4)).norm() < 1e-14);
}

TEST_CASE("hermitian_inv_sqrt of a diagonal matrix uses analytic roots") {
    CMat d = CMat::Zero(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 9.0;
    const CMat b = hermitian_inv_sqrt(HermitianPD(d));
    CHECK(std::abs(b(0, 0) - Complex(0.5, 0.0)) < 1e-14);
    CHECK(std::abs(b(1, 1) - Complex(1.0 / 3.0, 0.0)) < 1e-14);
    CHECK(std::abs(b(0, 1)) < 1e-14);
}

TEST_CASE("hermitian_inv_sqrt satisfies B a B = I on random HPD input") {
    const HermitianPD a(random_hpd(8, 42));
    const CMat b = hermitian_inv_sqrt(a);
    CHECK((b * a.matrix() * b - CMat::Identity(8, 8)).norm() < 1e-10);
    CHECK((b - b.adjoint()).norm() < 1e-12 * b.norm());
}

TEST_CASE("hermitian_inv_sqrt commutes with its argument") {
    const HermitianPD a(random_hpd(8, 43));
    const CMat b = hermitian_inv_sqrt(a);
    CHECK((b * a.matrix() - a.matrix() * b).norm() < 1e-10 * a.matrix().norm());
}

TEST_CASE("hermitian_inv_sqrt rejects non-PD input") {
    CMat d = CMat::Identity(3, 3);
    d(2, 2) = -1.0;
    CHECK_THROWS_AS(hermitian_inv_sqrt(HermitianPD(d)), NotPositiveDefinite);
    CHECK_THROWS_AS(hermitian_inv_sqrt(HermitianPD(CMat::Zero(3, 3))),
                    NotPositiveDefinite);
}

TEST_CASE("HermitianPD rejects visibly non-Hermitian input") {
    CMat m = CMat::Identity(3, 3);
    m(0, 1) = Complex(0.5, 0.0);
    CHECK_THROWS_AS(HermitianPD{m}, std::invalid_argument);
}

TEST_CASE("least squares on a single unit column is the matching entry") {
    CMat h = CMat::Zero(5, 1);
    h(0, 0) = 1.0;
    const CVec r = random_cvec(5, 7);
    const auto ls = least_squares_projection(h, r);
    CHECK(std::abs(ls.coeffs(0) - r(0)) < 1e-14);
    CHECK(ls.projection_energy == doctest::Approx(std::norm(r(0))).epsilon(1e-12));
}

TEST_CASE("least squares against orthogonal data has zero energy") {
    CMat h = CMat::Zero(4, 1);
    h(0, 0) = 1.0;
    CVec r = CVec::Zero(4);
    r(1) = Complex(2.0, -1.0);
    const auto ls = least_squares_projection(h, r);
    CHECK(ls.projection_energy < 1e-28);
}

TEST_CASE("least squares matches the explicit normal-equation oracle") {
    const CMat h = random_cmat(8, 3, 11);
    const CVec r = random_cvec(8, 12);
    const auto ls = least_squares_projection(h, r);

    // Brute-force oracle: coefficients by explicit inversion of h'h.
    const CMat gram = h.adjoint() * h;
    const CVec oracle = gram.inverse() * (h.adjoint() * r);
    CHECK((ls.coeffs - oracle).norm() < 1e-10 * oracle.norm());

    const double oracle_energy = r.dot(h * oracle).real();
    CHECK(ls.projection_energy ==
          doctest::Approx(oracle_energy).epsilon(1e-10));
    CHECK(ls.projection_energy <= r.squaredNorm() * (1.0 + 1e-12));
}

TEST_CASE("projection energy is invariant to a change of basis") {
    const CMat h = random_cmat(8, 3, 21);
    const CVec r = random_cvec(8, 22);
    CMat t = random_cmat(3, 3, 23);
    t += 3.0 * CMat::Identity(3, 3); // keep it comfortably invertible
    const double e1 = least_squares_projection(h, r).projection_energy;
    const double e2 = least_squares_projection(CMat(h * t), r).projection_energy;
    CHECK(e1 == doctest::Approx(e2).epsilon(1e-10));
}

TEST_CASE("projection is idempotent") {
    const CMat h = random_cmat(8, 3, 31);
    const CVec r = random_cvec(8, 32);
    const auto once = least_squares_projection(h, r);
    const CVec projected = h * once.coeffs;
    const auto twice = least_squares_projection(h, projected);
    CHECK(std::abs(twice.projection_energy - once.projection_energy) <=
          1e-12 * once.projection_energy);
}

TEST_CASE("rank-deficient least squares is rejected") {
    CMat h = random_cmat(6, 2, 41);
    CMat h3(6, 3);
    h3 << h, h.col(0); // exact linear dependence
    CHECK_THROWS_AS(least_squares_projection(h3, random_cvec(6, 42)), RankDeficient);
}

TEST_CASE("full_column_rank basics") {
    CHECK(full_column_rank(CMat::Identity(4, 4)));
    CMat dup(4, 2);
    dup.col(0) = random_cvec(4, 51);
    dup.col(1) = dup.col(0);
    CHECK_FALSE(full_column_rank(dup));
}

TEST_CASE("the baseline H1 stack has full column rank") {
    const auto& bl = testbed::baseline();
    const ManifoldBasis basis = bl.basis();
    CMat h1(basis.d_tilde.rows(), 2 * basis.d_tilde.cols());
    h1 << basis.d_tilde, basis.d_dot;
    CHECK(full_column_rank(h1));
}

TEST_SUITE_END();
