#pragma once

// Piecewise-linear download-cost curves over the caching ratio r in [0, 1],
// with exact rational corner coordinates and exact interpolation.

#include <stdexcept>
#include <utility>
#include <vector>

#include "pir/rational.hpp"

namespace pir {

struct CurvePoint {
    Rational r;
    Rational value;
};

class PiecewiseLinearCurve {
public:
    explicit PiecewiseLinearCurve(std::vector<CurvePoint> points)
        : points_(std::move(points)) {
        if (points_.size() < 2) {
            throw std::invalid_argument("PiecewiseLinearCurve: needs at least two points");
        }
        if (points_.front().r != Rational(0) || points_.back().r != Rational(1)) {
            throw std::invalid_argument("PiecewiseLinearCurve: must span r = 0 .. 1");
        }
        for (size_t i = 1; i < points_.size(); ++i) {
            if (!(points_[i - 1].r < points_[i].r)) {
                throw std::invalid_argument("PiecewiseLinearCurve: abscissas must strictly increase");
            }
        }
    }

    const std::vector<CurvePoint>& points() const { return points_; }

    /// Exact value at r; a corner abscissa returns the corner value.
    Rational eval(const Rational& r) const {
        if (r < Rational(0) || r > Rational(1)) {
            throw std::invalid_argument("PiecewiseLinearCurve::eval: r outside [0, 1]");
        }
        size_t lo = 0;
        size_t hi = points_.size() - 1;
        while (lo + 1 < hi) {
            size_t mid = (lo + hi) / 2;
            if (points_[mid].r <= r) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if (points_[lo].r == r) return points_[lo].value;
        if (points_[hi].r == r) return points_[hi].value;
        const CurvePoint& a = points_[lo];
        const CurvePoint& b = points_[hi];
        Rational slope = (b.value - a.value) / (b.r - a.r);
        return a.value + slope * (r - a.r);
    }

    std::vector<Rational> slopes() const {
        std::vector<Rational> out;
        out.reserve(points_.size() - 1);
        for (size_t i = 1; i < points_.size(); ++i) {
            out.push_back((points_[i].value - points_[i - 1].value) /
                          (points_[i].r - points_[i - 1].r));
        }
        return out;
    }

    bool is_convex() const {
        auto s = slopes();
        for (size_t i = 1; i < s.size(); ++i) {
            if (s[i] < s[i - 1]) return false;
        }
        return true;
    }

private:
    std::vector<CurvePoint> points_;
};

}  // namespace pir
