#pragma once

#include <cmath>
#include <cstdint>

#include "lamdet/types.hpp"

namespace lamdet {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Seed for one trial of one named stream. Every Monte-Carlo trial owns a
// private generator seeded through this, so results do not depend on how
// trials are scheduled across threads.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index) {
    constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;
    std::uint64_t z = mix64(master + kGamma * (stream + 1));
    return mix64(z + kGamma * (index + 1));
}

// SplitMix64 with Box-Muller Gaussians. Small, portable, and fully
// deterministic, which the reproducibility contract needs more than raw
// generator quality at desk-scale trial counts.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        return mix64(z);
    }

    // Uniform on (0, 1]; never returns 0 so log() below is safe.
    double next_unit() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double radius = std::sqrt(-2.0 * std::log(next_unit()));
        const double angle = 2.0 * kPi * next_unit();
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    // Circularly symmetric CN(0, 1): independent N(0, 1/2) real and
    // imaginary parts.
    Complex next_complex_normal() {
        constexpr double inv_sqrt2 = 0.70710678118654752440;
        const double re = next_gaussian();
        const double im = next_gaussian();
        return {re * inv_sqrt2, im * inv_sqrt2};
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace lamdet
