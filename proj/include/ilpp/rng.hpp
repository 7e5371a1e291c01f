#pragma once

#include <cmath>
#include <cstdint>

namespace ilpp::rng {

/// SplitMix64 finalizer: a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based key for the integer pair (a, b) under `seed`. Independent of
/// the order in which keys are generated.
constexpr std::uint64_t key(std::uint64_t seed, std::int64_t a, std::int64_t b) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ static_cast<std::uint64_t>(a));
    h = mix64(h ^ (static_cast<std::uint64_t>(b) * 0xd1b54a32d192ed03ULL));
    return h;
}

/// Uniform in (0, 1] from the top 53 bits.
inline double uniform_open0(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

/// Exp(1) variate by inversion.
inline double standard_exponential(std::uint64_t bits) {
    return -std::log(uniform_open0(bits));
}

}  // namespace ilpp::rng
