#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gm {

// std::shuffle and std::uniform_int_distribution are implementation-defined,
// so seeded runs would not reproduce across standard libraries. The helpers
// below pin the draw algorithm to the mt19937_64 bit stream, which the
// standard does specify.

using Rng = std::mt19937_64;

// Unbiased draw from [0, n) via rejection sampling.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    const std::uint64_t span = n;
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % span;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return static_cast<std::size_t>(x % span);
}

template <typename T>
void fisher_yates(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = uniform_index(rng, i);
        std::swap(items[i - 1], items[j]);
    }
}

} // namespace gm
