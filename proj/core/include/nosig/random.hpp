// Seeded random sources with platform-independent output.
//
// std::mt19937_64 has a fully specified output sequence; the standard
// distributions do not, so uniform and normal deviates are derived here.

#pragma once

#include <cstdint>
#include <random>

#include "nosig/linalg.hpp"

namespace nosig {

/// SplitMix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) {
    return mix_seed(mix_seed(seed) ^ (index * 0xd1b54a32d192ed03ULL + 1));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    /// Standard normal (Box-Muller, one deviate per call pair cached).
    double normal();

    Complex complex_normal() { return {normal(), normal()}; }

    bool bit() { return (engine_() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Haar-random unit vector.
PureState random_state(int dim, Rng& rng);

/// Random Hermitian matrix with Gaussian entries (GUE-like, unnormalized).
ComplexMatrix random_hermitian(int dim, Rng& rng);

/// Random positive semidefinite matrix G G* with G dim x rank Gaussian.
ComplexMatrix random_psd(int dim, int rank, Rng& rng);

/// Complex Gaussian matrix.
ComplexMatrix random_matrix(int rows, int cols, Rng& rng);

}  // namespace nosig
