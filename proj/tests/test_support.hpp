#pragma once

// Shared fixtures: the baseline scenario from the performance analysis
// (N = 16 half-wavelength ULA, order-3 coupling [0.7, 0.4], two jammers,
// look direction 35 deg) plus small random generators for property tests.

#include <cstdint>

#include "lamdet/config.hpp"
#include "lamdet/rng.hpp"

namespace testbed {

using namespace lamdet;

inline CVec random_cvec(int n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    CVec v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.next_complex_normal();
    return v;
}

inline CMat random_cmat(int rows, int cols, std::uint64_t seed) {
    SplitMix64 rng(seed);
    CMat m(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) m(r, c) = rng.next_complex_normal();
    return m;
}

inline CMat random_hpd(int n, std::uint64_t seed, double ridge = 0.1) {
    const CMat g = random_cmat(n, n, seed);
    return CMat(g * g.adjoint() + ridge * CMat::Identity(n, n));
}

struct Baseline {
    ExperimentConfig config;
    HarnessSetup setup;
    HermitianPD m;
    CMat m_sqrt;
    CVec p_m_target; // true coupled steering at the target direction

    Baseline()
        : setup(make_setup(config)),
          m(build_covariance(setup.env)),
          m_sqrt(hermitian_sqrt(m)),
          p_m_target(coupling_matrix(setup.env.coupling,
                                     setup.env.geometry.n_elements) *
                     steering(setup.env.geometry, setup.truth.u0)) {}

    const ArrayGeometry& geometry() const { return setup.env.geometry; }
    const PointingState& pointing() const { return setup.pointing; }
    const CouplingProfile& coupling() const { return setup.env.coupling; }
    int k() const { return setup.env.k_secondary; }

    ManifoldBasis basis(int order = 0) const {
        return manifold_basis(geometry(), pointing(),
                              order > 0 ? order : coupling().order());
    }

    SnapshotSet draw_h0(std::uint64_t seed) const {
        return draw_snapshots_colored(m_sqrt, std::nullopt, k(), seed);
    }

    SnapshotSet draw_h1(double sinr_db, std::uint64_t seed) const {
        const Complex a = amplitude_for_sinr(sinr_db, m, p_m_target);
        return draw_snapshots_colored(m_sqrt, CVec(a * p_m_target), k(), seed);
    }
};

inline const Baseline& baseline() {
    static const Baseline instance;
    return instance;
}

} // namespace testbed
