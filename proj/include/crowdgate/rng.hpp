#pragma once

// Seed-stream derivation. Every randomized stage gets its own generator,
// keyed by (seed, purpose, trial, index), so results never depend on how
// stages interleave and any single question can be replayed in isolation.

#include <cstdint>
#include <random>

namespace crowdgate {

/// Roles that own an independent random stream.
enum class Stream : std::uint64_t {
    PoolDraw = 1,
    GroundTruth = 2,
    Calibration = 3,
    HitWorkers = 4,
    HitAnswers = 5,
    BatchLayout = 6,
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) noexcept {
    // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

inline std::uint64_t deriveSeed(std::uint64_t seed, Stream stream, std::uint64_t a = 0,
                                std::uint64_t b = 0) {
    std::uint64_t z = detail::mix64(seed);
    z = detail::mix64(z ^ static_cast<std::uint64_t>(stream));
    z = detail::mix64(z ^ a);
    z = detail::mix64(z ^ b);
    return z;
}

inline std::mt19937_64 deriveRng(std::uint64_t seed, Stream stream, std::uint64_t a = 0,
                                 std::uint64_t b = 0) {
    return std::mt19937_64(deriveSeed(seed, stream, a, b));
}

}  // namespace crowdgate
