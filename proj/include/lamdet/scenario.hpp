#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lamdet/array_model.hpp"
#include "lamdet/numkernel.hpp"

namespace lamdet {

struct JammerSpec {
    double u = 0.0;             // directional cosine
    double power_ratio_db = 0.0; // sigma_i^2 / sigma_n^2 in dB
};

struct EnvironmentSpec {
    ArrayGeometry geometry;
    CouplingProfile coupling;   // true coupling of the array
    std::vector<JammerSpec> jammers;
    double noise_power = 1.0;   // sigma_n^2, linear
    int k_secondary = 0;        // K
    bool couple_jammers = true; // jammer steering through the true coupling
};

struct TargetTruth {
    double u0 = 0.0;
    Complex amplitude{0.0, 0.0};
    double delta_u = 0.0; // u0 - u_bar
};

struct SnapshotSet {
    CVec primary;        // r
    CMat secondary;      // N x K, columns r_k
    std::uint64_t seed = 0;
};

/// Interference-plus-noise covariance M = sum_i sigma_i^2 p_m(u_i) p_m(u_i)'
/// + sigma_n^2 I, with the jammer steering taken through the true coupling
/// matrix (switchable for ablation).
HermitianPD build_covariance(const EnvironmentSpec& env);

/// Complex amplitude a with |a|^2 p_m' M^{-1} p_m equal to the requested
/// SINR and arg(a) = phase.
Complex amplitude_for_sinr(double target_sinr_db, const HermitianPD& m,
                           const CVec& p_m, double phase = 0.0);

/// SINR (dB) realized by a given amplitude; round-trip check helper.
double sinr_db(const HermitianPD& m, Complex amplitude, const CVec& p_m);

/// Draws the primary vector (signal plus colored noise, or noise only) and K
/// secondary vectors, coloring standard complex normals by the Hermitian
/// square root of m. Identical seeds give bit-identical output.
SnapshotSet draw_snapshots(const HermitianPD& m, const std::optional<CVec>& signal,
                           int k, std::uint64_t seed);

/// Same as draw_snapshots with the coloring factor precomputed; hot path for
/// the Monte-Carlo engine.
SnapshotSet draw_snapshots_colored(const CMat& m_sqrt,
                                   const std::optional<CVec>& signal, int k,
                                   std::uint64_t seed);

} // namespace lamdet
