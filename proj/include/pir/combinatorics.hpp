#pragma once

// Exact big-integer combinatorics shared by the bounds formulas and the
// query planner.

#include <stdexcept>
#include <vector>

#include "pir/rational.hpp"

namespace pir {

/// C(n, k) with the usual convention that out-of-range k yields 0.
inline Bigint binomial(long n, long k) {
    if (n < 0) {
        throw std::invalid_argument("binomial: negative n");
    }
    if (k < 0 || k > n) {
        return 0;
    }
    if (k > n - k) {
        k = n - k;
    }
    Bigint result = 1;
    for (long i = 1; i <= k; ++i) {
        result *= n - k + i;
        result /= i;
    }
    return result;
}

inline Bigint int_pow(Bigint base, unsigned exp) {
    Bigint result = 1;
    while (exp != 0) {
        if (exp & 1u) result *= base;
        base *= base;
        exp >>= 1u;
    }
    return result;
}

inline long long_pow(long base, unsigned exp) {
    long result = 1;
    for (unsigned i = 0; i < exp; ++i) result *= base;
    return result;
}

/// All size-k subsets of `elems` in lexicographic order (elems assumed
/// sorted). k == 0 yields the single empty subset.
inline std::vector<std::vector<int>> lex_subsets(const std::vector<int>& elems, int k) {
    std::vector<std::vector<int>> out;
    const int n = static_cast<int>(elems.size());
    if (k < 0 || k > n) {
        return out;
    }
    std::vector<int> pick(static_cast<size_t>(k));
    // Standard combination walk: advance the rightmost index that can move.
    for (int i = 0; i < k; ++i) pick[static_cast<size_t>(i)] = i;
    while (true) {
        std::vector<int> subset(static_cast<size_t>(k));
        for (int i = 0; i < k; ++i) subset[static_cast<size_t>(i)] = elems[static_cast<size_t>(pick[static_cast<size_t>(i)])];
        out.push_back(std::move(subset));
        int i = k - 1;
        while (i >= 0 && pick[static_cast<size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++pick[static_cast<size_t>(i)];
        for (int j = i + 1; j < k; ++j) pick[static_cast<size_t>(j)] = pick[static_cast<size_t>(j - 1)] + 1;
    }
    return out;
}

}  // namespace pir
