#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace costarr {

// Counter-based generator: every draw is a pure function of
// (seed, stream, index), so any value in a synthetic dataset can be
// regenerated in isolation and the output never depends on call order
// or thread schedule.
namespace rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t rand_u64(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return mix64(mix64(seed + kGolden * (stream + 1)) + kGolden * (index + 1));
}

// [0, 1), 53-bit resolution.
inline double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return static_cast<double>(rand_u64(seed, stream, index) >> 11) * 0x1.0p-53;
}

// (0, 1]; safe as a log() argument.
inline double uniform01_open(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return static_cast<double>((rand_u64(seed, stream, index) >> 11) + 1) * 0x1.0p-53;
}

// Standard normal via Box-Muller; draw k consumes indices 2k and 2k+1.
inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t k) {
    double u1 = uniform01_open(seed, stream, 2 * k);
    double u2 = uniform01(seed, stream, 2 * k + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Uniform in (lo, hi]: open at the low edge so strict lower bounds hold.
inline double uniform_open_range(std::uint64_t seed, std::uint64_t stream, std::uint64_t index, double lo,
                                 double hi) {
    return lo + uniform01_open(seed, stream, index) * (hi - lo);
}

} // namespace rng

} // namespace costarr
