#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace perm::rng {

/// All randomness in the repo flows from std::mt19937_64 through explicit
/// seeds. Trial-level parallelism derives one engine per trial index so
/// results do not depend on the thread count.
using Engine = std::mt19937_64;

// splitmix64; decorrelates (seed, stream) pairs before seeding an engine.
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline Engine derive(std::uint64_t seed, std::uint64_t stream) {
    return Engine(mix(seed, stream));
}

/// Uniform in [0, 1) built from the top 53 bits; identical across platforms
/// for a given engine state, unlike std::uniform_real_distribution.
inline double uniform01(Engine& e) {
    return static_cast<double>(e() >> 11) * 0x1.0p-53;
}

/// Exp(1) by inverse CDF.
inline double exp1(Engine& e) {
    return -std::log1p(-uniform01(e));
}

} // namespace perm::rng
