#pragma once

#include <cstdint>
#include <random>

#include "biphoton/linalg.hpp"

namespace biphoton {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to decorrelate consecutive seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for trial `index` of a sweep started from `seed`.
constexpr std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index) { return splitmix64(seed + index); }

inline constexpr const char* kTrialSeedRule = "trial_seed = splitmix64(seed + trial_index), generator mt19937_64";

/// Entries i.i.d. complex standard normal (real and imaginary parts each N(0, 1/2)).
template <class URBG>
CMatrix complex_gaussian(Eigen::Index rows, Eigen::Index cols, URBG& rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            m(i, j) = Complex(re, im);
        }
    return m;
}

} // namespace biphoton
