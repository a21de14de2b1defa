#pragma once

// Parameters of one protocol instance. A instance is driven either by a
// corner index s or by a target caching ratio r; after resolution both are
// recorded (s stays unset for ratios strictly between corners, which are
// served by memory sharing).

#include <optional>
#include <stdexcept>

#include "pir/bounds.hpp"
#include "pir/rational.hpp"

namespace pir {

struct PirParams {
    int k = 0;  // messages
    int n = 0;  // databases
    // s = 0 is the no-cache corner, s = k the fully-cached endpoint.
    std::optional<int> s;
    Rational r;

    bool is_corner() const { return s.has_value(); }

    static PirParams from_corner(int k, int n, int s) {
        bounds::validate_corner(k, n, s);
        PirParams p;
        p.k = k;
        p.n = n;
        p.s = s;
        p.r = bounds::corner_ratio(k, n, s);
        return p;
    }

    static PirParams from_ratio(int k, int n, const Rational& r) {
        bounds::validate_kn(k, n);
        bounds::validate_ratio(r);
        PirParams p;
        p.k = k;
        p.n = n;
        p.r = r;
        if (r == Rational(1)) {
            p.s = k;
            return p;
        }
        for (int s = 0; s <= k - 1; ++s) {
            if (bounds::corner_ratio(k, n, s) == r) {
                p.s = s;
                return p;
            }
        }
        return p;
    }
};

}  // namespace pir
