#pragma once

#include <cstdint>
#include <random>

namespace cgp {

/// The single random-stream type threaded through every stochastic operation.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Stable across platforms and standard libraries.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent seed for a named substream of `seed`.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) noexcept
{
    return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

/// Uniform integer in [lo, hi).
template <typename Int>
inline Int uniform_index(Rng& rng, Int lo, Int hi)
{
    return std::uniform_int_distribution<Int>(lo, hi - 1)(rng);
}

inline bool bernoulli(Rng& rng, double p)
{
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

}  // namespace cgp
