#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>

namespace tvf::util {

// Unbiased draw from [0, n) by rejection; unlike std::uniform_int_distribution
// the result is identical across standard library implementations.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % bound);
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return static_cast<std::size_t>(x % bound);
}

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Per-item seed for item `index`, draw `draw`, of a run seeded with `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t draw = 0) noexcept {
    return splitmix64(splitmix64(seed ^ splitmix64(index)) + draw);
}

} // namespace tvf::util
