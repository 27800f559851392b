#pragma once

#include <cstdint>
#include <random>

namespace ineq::rng {

// splitmix64 finalizer; bijective on uint64.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Seed for the index-th stream under a master seed.  Replicates seeded this
// way produce identical results no matter how they are scheduled onto threads.
constexpr std::uint64_t substream(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ mix64(index + 0x632be59bd9b4e019ull));
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) { return Engine{seed}; }

// Uniform draw strictly inside (0,1): 53-bit mantissa plus half-ulp offset,
// so 0 and 1 are unreachable and quantile evaluators never see an endpoint.
inline double uniform01(Engine& e) {
    return (static_cast<double>(e() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace ineq::rng
