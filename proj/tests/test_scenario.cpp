#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "test_support.hpp"

using namespace lamdet;

TEST_SUITE_BEGIN("scenario");

TEST_CASE("covariance without jammers is the scaled identity") {
    EnvironmentSpec env{ArrayGeometry(8), CouplingProfile(1, {}), {}, 2.5, 8, true};
    const HermitianPD m = build_covariance(env);
    CHECK((m.matrix() - 2.5 * CMat::Identity(8, 8)).norm() == 0.0);

    env.noise_power = 0.0;
    CHECK_THROWS_AS(build_covariance(env), InvalidNoise);
}

TEST_CASE("single uncoupled jammer adds a rank-one term with trace sigma^2 N") {
    EnvironmentSpec env{ArrayGeometry(8), CouplingProfile(1, {}),
                        {JammerSpec{0.3, 20.0}}, 1.0, 8, true};
    const HermitianPD m = build_covariance(env);
    const CMat jam = m.matrix() - CMat::Identity(8, 8);
    Eigen::SelfAdjointEigenSolver<CMat> eig(jam);
    int nonzero = 0;
    for (int i = 0; i < 8; ++i) {
        if (eig.eigenvalues()(i) > 1e-9 * eig.eigenvalues()(7)) ++nonzero;
    }
    CHECK(nonzero == 1);
    CHECK(jam.trace().real() == doctest::Approx(100.0 * 8.0).epsilon(1e-12));
}

TEST_CASE("baseline covariance has exactly two dominant eigenvalues") {
    const auto& bl = testbed::baseline();
    Eigen::SelfAdjointEigenSolver<CMat> eig(bl.m.matrix());
    int dominant = 0;
    for (int i = 0; i < bl.geometry().n_elements; ++i) {
        if (eig.eigenvalues()(i) > 10.0 * bl.setup.env.noise_power) ++dominant;
    }
    CHECK(dominant == 2);
    CHECK((bl.m.matrix() - bl.m.matrix().adjoint()).norm() == 0.0);
}

TEST_CASE("amplitude_for_sinr closed form and round trip") {
    SUBCASE("identity covariance at 0 dB") {
        const HermitianPD m(CMat::Identity(16, 16));
        const CVec p = steering(ArrayGeometry(16), 0.2);
        const Complex a = amplitude_for_sinr(0.0, m, p);
        CHECK(std::abs(a) == doctest::Approx(0.25).epsilon(1e-12)); // 1/sqrt(N)
        CHECK(std::arg(a) == 0.0);
    }
    SUBCASE("round trip at the baseline scenario") {
        const auto& bl = testbed::baseline();
        for (const double target : {0.0, 10.0, 15.0, 30.0}) {
            const Complex a = amplitude_for_sinr(target, bl.m, bl.p_m_target, 0.7);
            CHECK(sinr_db(bl.m, a, bl.p_m_target) ==
                  doctest::Approx(target).epsilon(1e-10));
            CHECK(std::arg(a) == doctest::Approx(0.7).epsilon(1e-12));
        }
    }
    SUBCASE("direct evaluation at 15 dB") {
        const auto& bl = testbed::baseline();
        const Complex a = amplitude_for_sinr(15.0, bl.m, bl.p_m_target);
        const Eigen::LLT<CMat> llt(bl.m.matrix());
        const double quad = bl.p_m_target.dot(llt.solve(bl.p_m_target)).real();
        CHECK(std::norm(a) ==
              doctest::Approx(std::pow(10.0, 1.5) / quad).epsilon(1e-12));
    }
}

TEST_CASE("draw_snapshots determinism and shape") {
    const auto& bl = testbed::baseline();
    const SnapshotSet a = bl.draw_h0(1234);
    const SnapshotSet b = bl.draw_h0(1234);
    CHECK(a.primary == b.primary);
    CHECK(a.secondary == b.secondary);
    CHECK(a.secondary.cols() == bl.k());

    const SnapshotSet c = bl.draw_h0(1235);
    CHECK(a.primary != c.primary);

    CHECK_THROWS_AS(draw_snapshots(bl.m, std::nullopt, 8, 1), InsufficientSecondaryData);
}

TEST_CASE("white snapshots have unit per-element variance") {
    const HermitianPD m(CMat::Identity(4, 4));
    double acc = 0.0;
    int count = 0;
    for (int t = 0; t < 2500; ++t) {
        const SnapshotSet snaps = draw_snapshots(m, std::nullopt, 4, derive_seed(9, 1, t));
        acc += snaps.primary.squaredNorm();
        count += 4;
    }
    CHECK(acc / count == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("degenerate noise leaves the signal") {
    const HermitianPD m(CMat(1e-12 * CMat::Identity(6, 6)));
    const CVec signal = testbed::random_cvec(6, 55);
    const SnapshotSet snaps = draw_snapshots(m, signal, 6, 77);
    CHECK((snaps.primary - signal).norm() < 1e-4 * signal.norm());
}

TEST_CASE("sample covariance of many draws approaches M") {
    const auto& bl = testbed::baseline();
    const int n = bl.geometry().n_elements;
    CMat acc = CMat::Zero(n, n);
    const int trials = 400;           // 400 draws x 48 columns = 19200 samples
    for (int t = 0; t < trials; ++t) {
        const SnapshotSet snaps = bl.draw_h0(derive_seed(31, 7, t));
        acc += snaps.secondary * snaps.secondary.adjoint();
    }
    acc /= static_cast<double>(trials * bl.k());
    CHECK((acc - bl.m.matrix()).norm() / bl.m.matrix().norm() < 0.02);
}

TEST_SUITE_END();
