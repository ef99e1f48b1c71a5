#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "dirot/errors.hpp"
#include "dirot/measures.hpp"
#include "dirot/rational.hpp"

namespace dirot {

/// Strictly increasing piecewise-linear map of the line, right-continuous,
/// possibly with upward jumps. At knot x the map jumps from `left` to `right`
/// (equal when continuous) and the closed interval [left, right] is the jump
/// interval of x. Between knots it is affine; beyond the outer knots it is
/// extended with the given end slopes.
class MonotoneMap {
 public:
  struct MapKnot {
    Rational x;
    Rational left;
    Rational right;
  };

  MonotoneMap() : MonotoneMap(std::vector<MapKnot>{}, 1, 1) {}

  MonotoneMap(std::vector<MapKnot> knots, Rational left_slope, Rational right_slope)
      : knots_(std::move(knots)), left_slope_(std::move(left_slope)), right_slope_(std::move(right_slope)) {
    if (left_slope_ <= 0 || right_slope_ <= 0) throw DomainError("monotone map: end slopes must be positive");
    for (std::size_t i = 0; i < knots_.size(); ++i) {
      if (knots_[i].right < knots_[i].left) throw DomainError("monotone map: jump must be upward");
      if (i > 0) {
        if (knots_[i].x <= knots_[i - 1].x) throw DomainError("monotone map: knots must increase");
        if (knots_[i].left <= knots_[i - 1].right) throw DomainError("monotone map: not strictly increasing");
      }
    }
  }

  static MonotoneMap identity() { return MonotoneMap(); }

  /// x -> intercept + slope * x.
  static MonotoneMap affine(const Rational& intercept, const Rational& slope) {
    if (slope <= 0) throw DomainError("monotone map: slope must be positive");
    return MonotoneMap({{Rational(0), intercept, intercept}}, slope, slope);
  }

  /// Continuous map through the given points; end slopes continue the
  /// outermost pieces (or `slope_if_single` when only one point is given).
  static MonotoneMap through_points(std::vector<std::pair<Rational, Rational>> points,
                                    const Rational& slope_if_single = Rational(1)) {
    if (points.empty()) return identity();
    std::vector<MapKnot> knots;
    for (auto& [x, y] : points) knots.push_back({x, y, y});
    Rational ls = slope_if_single, rs = slope_if_single;
    if (knots.size() >= 2) {
      ls = (knots[1].left - knots[0].right) / (knots[1].x - knots[0].x);
      const std::size_t n = knots.size();
      rs = (knots[n - 1].left - knots[n - 2].right) / (knots[n - 1].x - knots[n - 2].x);
    }
    return MonotoneMap(std::move(knots), ls, rs);
  }

  const std::vector<MapKnot>& knots() const { return knots_; }

  Rational operator()(const Rational& x) const { return eval(x, false); }
  Rational left_limit(const Rational& x) const { return eval(x, true); }

  /// Rounded image of a double location.
  double apply(double x) const { return to_double((*this)(exact(x))); }

  /// Inverse on the range; points inside a jump interval collapse to its knot.
  Rational inverse(const Rational& z) const {
    if (knots_.empty()) return z / right_slope_;
    if (z < knots_.front().left) return knots_.front().x - (knots_.front().left - z) / left_slope_;
    if (z > knots_.back().right) return knots_.back().x + (z - knots_.back().right) / right_slope_;
    for (std::size_t i = 0; i < knots_.size(); ++i) {
      const MapKnot& k = knots_[i];
      if (z >= k.left && z <= k.right) return k.x;
      if (i + 1 < knots_.size() && z > k.right && z < knots_[i + 1].left) {
        const MapKnot& n = knots_[i + 1];
        return k.x + (z - k.right) * (n.x - k.x) / (n.left - k.right);
      }
    }
    throw DomainError("monotone map: inverse out of range");  // unreachable
  }

  /// Slope on the open piece to the right of x.
  Rational slope_right_of(const Rational& x) const {
    if (knots_.empty()) return right_slope_;
    if (x < knots_.front().x) return left_slope_;
    if (x >= knots_.back().x) return right_slope_;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                               [](const Rational& v, const MapKnot& k) { return v < k.x; });
    const MapKnot& r = *it;
    const MapKnot& l = *(it - 1);
    return (r.left - l.right) / (r.x - l.x);
  }

  std::vector<Rational> knot_locations() const {
    std::vector<Rational> out;
    for (const MapKnot& k : knots_) out.push_back(k.x);
    return out;
  }

 private:
  Rational eval(const Rational& x, bool from_left) const {
    if (knots_.empty()) return x * right_slope_;
    if (x < knots_.front().x) return knots_.front().left - (knots_.front().x - x) * left_slope_;
    if (x > knots_.back().x) return knots_.back().right + (x - knots_.back().x) * right_slope_;
    auto it = std::lower_bound(knots_.begin(), knots_.end(), x,
                               [](const MapKnot& k, const Rational& v) { return k.x < v; });
    if (it->x == x) return from_left ? it->left : it->right;
    const MapKnot& r = *it;
    const MapKnot& l = *(it - 1);
    return l.right + (x - l.x) * (r.left - l.right) / (r.x - l.x);
  }

  std::vector<MapKnot> knots_;
  Rational left_slope_;
  Rational right_slope_;
};

/// Image of an atomless measure under a strictly increasing map.
inline PLMeasure push_forward(const PLMeasure& m, const MonotoneMap& phi) {
  std::vector<Segment> out;
  const auto cuts = phi.knot_locations();
  for (const Segment& s : m.segments()) {
    std::vector<Rational> pts{s.lo};
    for (const Rational& c : cuts) {
      if (c > s.lo && c < s.hi) pts.push_back(c);
    }
    pts.push_back(s.hi);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const Rational a = phi(pts[i - 1]);
      const Rational b = phi.left_limit(pts[i]);
      out.push_back({a, b, s.density * (pts[i] - pts[i - 1]) / (b - a)});
    }
  }
  return PLMeasure::from_segments(std::move(out));
}

}  // namespace dirot
