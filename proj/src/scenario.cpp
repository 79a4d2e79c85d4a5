#include "lamdet/scenario.hpp"

#include <cmath>

#include "lamdet/rng.hpp"

namespace lamdet {

HermitianPD build_covariance(const EnvironmentSpec& env) {
    if (!(env.noise_power > 0.0)) {
        throw InvalidNoise("build_covariance: noise power must be positive");
    }
    const int n = env.geometry.n_elements;
    const CMat c = coupling_matrix(env.coupling, n);
    CMat m = env.noise_power * CMat::Identity(n, n);
    for (const JammerSpec& jam : env.jammers) {
        const CVec p = steering(env.geometry, jam.u); // throws if out of region
        const CVec pj = env.couple_jammers ? CVec(c * p) : p;
        const double power = env.noise_power * std::pow(10.0, jam.power_ratio_db / 10.0);
        m += power * (pj * pj.adjoint());
    }
    return HermitianPD(std::move(m));
}

namespace {

double whitened_energy(const HermitianPD& m, const CVec& p_m) {
    const Eigen::LLT<CMat> llt(m.matrix());
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("amplitude_for_sinr: covariance not PD");
    }
    return p_m.dot(llt.solve(p_m)).real(); // p_m' M^{-1} p_m
}

} // namespace

Complex amplitude_for_sinr(double target_sinr_db, const HermitianPD& m,
                           const CVec& p_m, double phase) {
    if (p_m.norm() == 0.0) {
        throw DegenerateVector("amplitude_for_sinr: zero steering vector");
    }
    const double quad = whitened_energy(m, p_m);
    const double magnitude = std::sqrt(std::pow(10.0, target_sinr_db / 10.0) / quad);
    return std::polar(magnitude, phase);
}

double sinr_db(const HermitianPD& m, Complex amplitude, const CVec& p_m) {
    return 10.0 * std::log10(std::norm(amplitude) * whitened_energy(m, p_m));
}

SnapshotSet draw_snapshots(const HermitianPD& m, const std::optional<CVec>& signal,
                           int k, std::uint64_t seed) {
    return draw_snapshots_colored(hermitian_sqrt(m), signal, k, seed);
}

SnapshotSet draw_snapshots_colored(const CMat& m_sqrt,
                                   const std::optional<CVec>& signal, int k,
                                   std::uint64_t seed) {
    const int n = static_cast<int>(m_sqrt.rows());
    if (k < n) {
        throw InsufficientSecondaryData("draw_snapshots: K < N");
    }
    if (signal && signal->size() != n) {
        throw std::invalid_argument("draw_snapshots: signal size mismatch");
    }
    SplitMix64 rng(seed);
    CVec w(n);
    const auto draw_white = [&] {
        for (int i = 0; i < n; ++i) w(i) = rng.next_complex_normal();
    };

    SnapshotSet out;
    out.seed = seed;
    draw_white();
    out.primary = m_sqrt * w;
    if (signal) out.primary += *signal;
    out.secondary.resize(n, k);
    for (int col = 0; col < k; ++col) {
        draw_white();
        out.secondary.col(col) = m_sqrt * w;
    }
    return out;
}

} // namespace lamdet
