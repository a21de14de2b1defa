#pragma once

// Closed-form download-cost bounds for cache-aided PIR with partially
// known uncoded prefetching: achievable (outer) corner points and curve,
// converse (inner) curve, baseline costs, the outer/inner gap and its
// worst case, the large-K envelope, and the related algebraic identities.
//
// Conventions used throughout:
//   k — number of messages (>= 2), n — number of databases (>= 2),
//   s — corner index. s = 0 denotes the no-side-information corner
//   (r = 0, classical cost); s in 1..k-1 are the non-degenerate corners.
// All results are exact rationals.

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pir/combinatorics.hpp"
#include "pir/curve.hpp"
#include "pir/rational.hpp"

namespace pir::bounds {

inline void validate_kn(int k, int n) {
    if (k < 2) throw std::invalid_argument("bounds: need at least 2 messages");
    if (n < 2) throw std::invalid_argument("bounds: need at least 2 databases");
}

inline void validate_corner(int k, int n, int s) {
    validate_kn(k, n);
    if (s < 0 || s > k - 1) {
        throw std::invalid_argument("bounds: corner index s must lie in 0..k-1");
    }
}

inline void validate_ratio(const Rational& r) {
    if (r < Rational(0) || r > Rational(1)) {
        throw std::invalid_argument("bounds: caching ratio must lie in [0, 1]");
    }
}

/// 1 + 1/n + ... + 1/n^(k-1): the cost of retrieval with no cache.
inline Rational classical_cost(int k, int n) {
    validate_kn(k, n);
    // Geometric sum with exact arithmetic: (n^k - 1) / (n^k - n^(k-1)).
    Bigint nk = int_pow(n, static_cast<unsigned>(k));
    return Rational(nk - 1, nk - nk / n);
}

namespace detail {

/// sum_{i=0}^{k-1-s} C(k-1, s+i) (n-1)^(i+1) — the shared denominator tail.
inline Bigint corner_denominator_tail(int k, int n, int s) {
    Bigint total = 0;
    for (int i = 0; i <= k - 1 - s; ++i) {
        total += binomial(k - 1, s + i) * int_pow(n - 1, static_cast<unsigned>(i + 1));
    }
    return total;
}

/// sum_{i=0}^{k-1-s} C(k, s+1+i) (n-1)^(i+1) — the download numerator.
inline Bigint corner_download_sum(int k, int n, int s) {
    Bigint total = 0;
    for (int i = 0; i <= k - 1 - s; ++i) {
        total += binomial(k, s + 1 + i) * int_pow(n - 1, static_cast<unsigned>(i + 1));
    }
    return total;
}

}  // namespace detail

/// Caching ratio r_s of corner s. r_0 = 0 by convention.
inline Rational corner_ratio(int k, int n, int s) {
    validate_corner(k, n, s);
    if (s == 0) return Rational(0);
    Bigint cached = binomial(k - 2, s - 1);
    return Rational(cached, cached + detail::corner_denominator_tail(k, n, s));
}

/// Normalized download cost at corner s. s = 0 yields the classical cost.
inline Rational corner_cost(int k, int n, int s) {
    validate_corner(k, n, s);
    if (s == 0) return classical_cost(k, n);
    return Rational(detail::corner_download_sum(k, n, s),
                    binomial(k - 2, s - 1) + detail::corner_denominator_tail(k, n, s));
}

/// Message length L(s) used by the corner-s scheme (s >= 1).
inline Bigint message_length(int k, int n, int s) {
    validate_corner(k, n, s);
    if (s == 0) {
        throw std::invalid_argument("message_length: s = 0 has no corner scheme length; "
                                    "use classical_message_length");
    }
    return n * binomial(k - 2, s - 1) + n * detail::corner_denominator_tail(k, n, s);
}

/// Bits downloaded by the corner-s scheme (s >= 1).
inline Bigint download_count(int k, int n, int s) {
    validate_corner(k, n, s);
    if (s == 0) {
        throw std::invalid_argument("download_count: s = 0 has no corner scheme; "
                                    "use classical_download_count");
    }
    return n * detail::corner_download_sum(k, n, s);
}

/// Message length of the no-cache scheme realized by the same round engine.
inline Bigint classical_message_length(int k, int n) {
    if (k < 1) throw std::invalid_argument("classical_message_length: need k >= 1");
    if (n < 2) throw std::invalid_argument("classical_message_length: need n >= 2");
    return int_pow(n, static_cast<unsigned>(k)) * (n - 1);
}

inline Bigint classical_download_count(int k, int n) {
    if (k < 1) throw std::invalid_argument("classical_download_count: need k >= 1");
    if (n < 2) throw std::invalid_argument("classical_download_count: need n >= 2");
    return n * (int_pow(n, static_cast<unsigned>(k)) - 1);
}

struct CornerPoint {
    int s = 0;
    Rational ratio;
    Rational cost;
    Bigint message_length;
    Bigint download_count;
};

inline CornerPoint corner_point(int k, int n, int s) {
    validate_corner(k, n, s);
    CornerPoint p;
    p.s = s;
    p.ratio = corner_ratio(k, n, s);
    p.cost = corner_cost(k, n, s);
    if (s == 0) {
        p.message_length = classical_message_length(k, n);
        p.download_count = classical_download_count(k, n);
    } else {
        p.message_length = message_length(k, n, s);
        p.download_count = download_count(k, n, s);
    }
    return p;
}

/// Corners s = 0..k-1 in increasing ratio order.
inline std::vector<CornerPoint> corner_points(int k, int n) {
    validate_kn(k, n);
    std::vector<CornerPoint> out;
    out.reserve(static_cast<size_t>(k));
    for (int s = 0; s <= k - 1; ++s) out.push_back(corner_point(k, n, s));
    return out;
}

/// Achievable cost curve: corners s = 0..k-1 plus the fully-cached endpoint.
inline PiecewiseLinearCurve outer_curve(int k, int n) {
    validate_kn(k, n);
    std::vector<CurvePoint> pts;
    pts.reserve(static_cast<size_t>(k) + 1);
    for (int s = 0; s <= k - 1; ++s) {
        pts.push_back({corner_ratio(k, n, s), corner_cost(k, n, s)});
    }
    pts.push_back({Rational(1), Rational(0)});
    return PiecewiseLinearCurve(std::move(pts));
}

/// Value of converse line i (i in 2..k+1) at ratio r:
/// sum_{j=0}^{k+1-i} n^{-j} - (k+2-i) r.
inline Rational inner_line(int k, int n, int i, const Rational& r) {
    validate_kn(k, n);
    if (i < 2 || i > k + 1) {
        throw std::invalid_argument("inner_line: line index must lie in 2..k+1");
    }
    Bigint np = int_pow(n, static_cast<unsigned>(k + 1 - i));
    // sum_{j=0}^{m} n^{-j} = (n^{m+1} - 1) / (n^{m+1} - n^m).
    Rational partial = Rational(np * n - 1, np * n - np);
    return partial - Rational(k + 2 - i) * r;
}

/// Converse (lower) bound at ratio r: max over the k lines.
inline Rational inner_cost(int k, int n, const Rational& r) {
    validate_kn(k, n);
    validate_ratio(r);
    Rational best = inner_line(k, n, 2, r);
    for (int i = 3; i <= k + 1; ++i) {
        Rational v = inner_line(k, n, i, r);
        if (v > best) best = v;
    }
    return best;
}

/// Abscissa where converse lines i and i+1 intersect: n^-(k-i).
inline Rational inner_corner(int k, int n, int i) {
    validate_kn(k, n);
    if (i < 1 || i > k - 1) {
        throw std::invalid_argument("inner_corner: index must lie in 1..k-1");
    }
    return Rational(Bigint(1), int_pow(n, static_cast<unsigned>(k - i)));
}

/// Converse curve as an explicit piecewise-linear object; agrees with
/// inner_cost everywhere.
inline PiecewiseLinearCurve inner_curve(int k, int n) {
    validate_kn(k, n);
    std::vector<CurvePoint> pts;
    pts.reserve(static_cast<size_t>(k) + 1);
    pts.push_back({Rational(0), classical_cost(k, n)});
    for (int i = 1; i <= k - 1; ++i) {
        Rational r = inner_corner(k, n, i);
        pts.push_back({r, inner_cost(k, n, r)});
    }
    pts.push_back({Rational(1), Rational(0)});
    return PiecewiseLinearCurve(std::move(pts));
}

/// Outer minus inner at ratio r; nonnegative.
inline Rational gap(int k, int n, const Rational& r) {
    validate_kn(k, n);
    validate_ratio(r);
    return outer_curve(k, n).eval(r) - inner_cost(k, n, r);
}

struct GapResult {
    Rational max_gap;
    Rational argmax_r;
};

/// Maximum of the gap over r in [0, 1] and the smallest ratio attaining it.
/// The gap is convex between consecutive inner-curve corners (convex outer
/// minus a single line), so checking the corner abscissas of both curves
/// plus the endpoints is exhaustive.
inline GapResult worst_case_gap(int k, int n) {
    validate_kn(k, n);
    PiecewiseLinearCurve outer = outer_curve(k, n);
    PiecewiseLinearCurve inner = inner_curve(k, n);
    std::vector<Rational> candidates;
    candidates.push_back(Rational(0));
    candidates.push_back(Rational(1));
    for (int i = 1; i <= k - 1; ++i) candidates.push_back(inner_corner(k, n, i));
    for (int s = 1; s <= k - 1; ++s) candidates.push_back(corner_ratio(k, n, s));
    GapResult best{Rational(-1), Rational(0)};
    for (const Rational& r : candidates) {
        Rational g = outer.eval(r) - inner.eval(r);
        if (g > best.max_gap || (g == best.max_gap && r < best.argmax_r)) {
            best = GapResult{g, r};
        }
    }
    return best;
}

/// Large-K upper envelope of the achievable cost: n/(n-1) (1-r)^2.
inline Rational asymptotic_envelope(int n, const Rational& r) {
    if (n < 2) throw std::invalid_argument("asymptotic_envelope: need n >= 2");
    validate_ratio(r);
    Rational one_minus = Rational(1) - r;
    return Rational(Bigint(n), Bigint(n - 1)) * one_minus * one_minus;
}

struct PsiDecomposition {
    Rational psi1;
    Rational psi2;
};

/// Splits the corner cost as psi1 / (psi2 + 1); the identity holds exactly.
inline PsiDecomposition psi_decomposition(int k, int n, int s) {
    validate_corner(k, n, s);
    if (s == 0) {
        throw std::invalid_argument("psi_decomposition: s must lie in 1..k-1");
    }
    Bigint tail = detail::corner_denominator_tail(k, n, s);
    return PsiDecomposition{Rational(detail::corner_download_sum(k, n, s), tail),
                            Rational(binomial(k - 2, s - 1), tail)};
}

/// Coefficient alpha placing corner s of the (k+1)-message curve on the
/// segment between corners s-1 and s of the k-message curve:
///   r_s(k+1) = alpha r_{s-1}(k) + (1-alpha) r_s(k)
/// and the same combination must reproduce the cost exactly. Throws if the
/// witness falls outside [0, 1] or the cost identity fails.
inline Rational monotonicity_witness(int k, int n, int s) {
    validate_kn(k, n);
    if (s < 1 || s > k - 1) {
        throw std::invalid_argument("monotonicity_witness: s must lie in 1..k-1");
    }
    Rational r_lo = corner_ratio(k, n, s - 1);
    Rational r_hi = corner_ratio(k, n, s);
    Rational r_mid = corner_ratio(k + 1, n, s);
    Rational alpha = (r_hi - r_mid) / (r_hi - r_lo);
    if (alpha < Rational(0) || alpha > Rational(1)) {
        throw std::runtime_error("monotonicity_witness: alpha outside [0, 1] at k=" +
                                 std::to_string(k) + " n=" + std::to_string(n) +
                                 " s=" + std::to_string(s));
    }
    Rational combined = alpha * corner_cost(k, n, s - 1) +
                        (Rational(1) - alpha) * corner_cost(k, n, s);
    if (combined != corner_cost(k + 1, n, s)) {
        throw std::runtime_error("monotonicity_witness: cost identity failed at k=" +
                                 std::to_string(k) + " n=" + std::to_string(n) +
                                 " s=" + std::to_string(s));
    }
    return alpha;
}

/// Baseline where every database knows the entire cache:
/// (1 - r)(1 + 1/n + ... + 1/n^(k-1)).
inline Rational fully_known_cost(int k, int n, const Rational& r) {
    validate_kn(k, n);
    validate_ratio(r);
    return (Rational(1) - r) * classical_cost(k, n);
}

}  // namespace pir::bounds
