#pragma once

// Deterministic randomness helpers. Every randomized operation in the
// library derives its stream from a caller-supplied 64-bit seed through
// these functions only, so identical seeds reproduce identical plans,
// stores and reports on any platform. std::uniform_int_distribution is
// avoided on purpose: its output is not pinned by the standard.

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace pir {

using Rng = std::mt19937_64;

/// splitmix64 step; used to derive independent sub-seeds from one seed.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t seed, uint64_t tag) {
    return mix64(seed ^ mix64(tag));
}

/// Unbiased draw from [0, bound) via rejection sampling.
inline uint64_t bounded(Rng& rng, uint64_t bound) {
    if (bound <= 1) return 0;
    const uint64_t max = std::numeric_limits<uint64_t>::max();
    const uint64_t limit = max - max % bound;  // multiple of bound
    uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

template <typename T>
void shuffle_in_place(std::vector<T>& items, Rng& rng) {
    for (size_t i = items.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(bounded(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

/// Uniform random permutation of 0..n-1.
inline std::vector<size_t> random_permutation(size_t n, Rng& rng) {
    std::vector<size_t> p(n);
    for (size_t i = 0; i < n; ++i) p[i] = i;
    shuffle_in_place(p, rng);
    return p;
}

/// `count` distinct values sampled uniformly from `pool`, in random order.
template <typename T>
std::vector<T> sample_without_replacement(const std::vector<T>& pool, size_t count, Rng& rng) {
    std::vector<T> scratch = pool;
    std::vector<T> out;
    out.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        size_t j = i + static_cast<size_t>(bounded(rng, scratch.size() - i));
        std::swap(scratch[i], scratch[j]);
        out.push_back(scratch[i]);
    }
    return out;
}

}  // namespace pir
