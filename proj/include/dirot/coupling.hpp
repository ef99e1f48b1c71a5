#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dirot/errors.hpp"
#include "dirot/measures.hpp"
#include "dirot/monotone_map.hpp"
#include "dirot/rational.hpp"

namespace dirot {

struct SupportPoint {
  double x;
  double y;
  Rational mass;
  bool operator==(const SupportPoint&) const = default;
};

/// Finitely supported joint law. Points are kept sorted by (x, y) with
/// duplicates merged, so equality of couplings is structural.
class Coupling {
 public:
  Coupling() = default;

  explicit Coupling(std::vector<SupportPoint> points) {
    for (const SupportPoint& p : points) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DomainError("coupling point must be finite");
      if (p.mass <= 0) throw DomainError("coupling masses must be positive");
    }
    std::sort(points.begin(), points.end(), [](const SupportPoint& a, const SupportPoint& b) {
      return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    for (SupportPoint& p : points) {
      if (!points_.empty() && points_.back().x == p.x && points_.back().y == p.y) {
        points_.back().mass += p.mass;
      } else {
        points_.push_back(std::move(p));
      }
    }
    std::vector<Atom> xs, ys;
    xs.reserve(points_.size());
    ys.reserve(points_.size());
    for (const SupportPoint& p : points_) {
      xs.push_back({p.x, p.mass});
      ys.push_back({p.y, p.mass});
    }
    mu_ = DiscreteMeasure(std::move(xs));
    nu_ = DiscreteMeasure(std::move(ys));
  }

  const std::vector<SupportPoint>& points() const { return points_; }
  const DiscreteMeasure& first_marginal() const { return mu_; }
  const DiscreteMeasure& second_marginal() const { return nu_; }
  Rational total_mass() const { return mu_.total_mass(); }
  std::size_t size() const { return points_.size(); }

  bool operator==(const Coupling& other) const { return points_ == other.points_; }

 private:
  std::vector<SupportPoint> points_;
  DiscreteMeasure mu_;
  DiscreteMeasure nu_;
};

enum class Shape { submodular, strictly_submodular, supermodular, unknown };

/// Reward g(x, y) on the halfplane y >= x with a declared modularity shape.
struct CostFunction {
  std::function<double(double, double)> evaluator;
  Shape declared_shape = Shape::unknown;
  std::string name;

  double operator()(double x, double y) const { return evaluator(x, y); }
};

namespace costs {

inline CostFunction squared_gap() {
  return {[](double x, double y) { return (x - y) * (x - y); }, Shape::strictly_submodular, "(x-y)^2"};
}

inline CostFunction neg_sqrt_gap() {
  return {[](double x, double y) { return -std::sqrt(std::abs(y - x)); }, Shape::strictly_submodular,
          "-sqrt|y-x|"};
}

inline CostFunction neg_product() {
  return {[](double x, double y) { return -x * y; }, Shape::strictly_submodular, "-xy"};
}

/// |y - x|^p for p in (0, 1]: concave in the gap, supermodular on the
/// halfplane. Used as a transport cost to be minimized.
inline CostFunction gap_power(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("gap_power needs p in (0, 1]");
  return {[p](double x, double y) { return std::pow(std::abs(y - x), p); }, Shape::supermodular,
          "|y-x|^" + format_double(p)};
}

/// -|y - x|^p: the reward counterpart of gap_power, submodular on the halfplane
/// (strictly for p < 1).
inline CostFunction neg_gap_power(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("neg_gap_power needs p in (0, 1]");
  return {[p](double x, double y) { return -std::pow(std::abs(y - x), p); },
          p < 1.0 ? Shape::strictly_submodular : Shape::submodular, "-|y-x|^" + format_double(p)};
}

}  // namespace costs

inline bool is_directional(const Coupling& p) {
  return std::all_of(p.points().begin(), p.points().end(), [](const SupportPoint& s) { return s.y >= s.x; });
}

using PointPair = std::pair<SupportPoint, SupportPoint>;

/// Some support pair with x < x' <= y < y', if one exists.
inline std::optional<PointPair> find_improvable_pair(const Coupling& p) {
  if (!is_directional(p)) throw DomainError("find_improvable_pair: coupling is not directional");
  const auto& pts = p.points();
  for (const SupportPoint& a : pts) {
    for (const SupportPoint& b : pts) {
      if (a.x < b.x && b.x <= a.y && a.y < b.y) return PointPair{a, b};
    }
  }
  return std::nullopt;
}

namespace detail {
inline Coupling quantile_match(const DiscreteMeasure& mu, const DiscreteMeasure& nu, bool reverse_nu) {
  if (mu.total_mass() != nu.total_mass()) throw DomainError("coupling requires equal masses");
  std::vector<Atom> ys = nu.atoms();
  if (reverse_nu) std::reverse(ys.begin(), ys.end());
  std::vector<SupportPoint> pts;
  std::size_t i = 0, j = 0;
  Rational left_mu = mu.empty() ? Rational(0) : mu.atoms()[0].mass;
  Rational left_nu = ys.empty() ? Rational(0) : ys[0].mass;
  while (i < mu.size() && j < ys.size()) {
    Rational take = left_mu < left_nu ? left_mu : left_nu;
    pts.push_back({mu.atoms()[i].location, ys[j].location, take});
    left_mu -= take;
    left_nu -= take;
    if (left_mu == 0 && ++i < mu.size()) left_mu = mu.atoms()[i].mass;
    if (left_nu == 0 && ++j < ys.size()) left_nu = ys[j].mass;
  }
  return Coupling(std::move(pts));
}
}  // namespace detail

/// Order-preserving quantile coupling.
inline Coupling comonotone(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  return detail::quantile_match(mu, nu, false);
}

/// Order-reversing quantile coupling.
inline Coupling antitone(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  return detail::quantile_match(mu, nu, true);
}

inline Coupling identity(const DiscreteMeasure& mu) {
  std::vector<SupportPoint> pts;
  for (const Atom& a : mu.atoms()) pts.push_back({a.location, a.location, a.mass});
  return Coupling(std::move(pts));
}

inline double expected_cost(const Coupling& p, const CostFunction& g) {
  double total = 0.0;
  for (const SupportPoint& s : p.points()) {
    const double v = g(s.x, s.y);
    if (!std::isfinite(v)) {
      throw EvaluationError("cost " + g.name + " is not finite at (" + format_double(s.x) + ", " +
                            format_double(s.y) + ")");
    }
    total += to_double(s.mass) * v;
  }
  return total;
}

/// Exact sum of mass * (y - x)^2.
inline Rational expected_squared_gap(const Coupling& p) {
  Rational total = 0;
  for (const SupportPoint& s : p.points()) {
    const Rational d = exact(s.y) - exact(s.x);
    total += s.mass * d * d;
  }
  return total;
}

/// Grid certificate of g(x,y) + g(x',y') <= g(x,y') + g(x',y) over all grid
/// quadruples with x < x' <= y < y'. Uses a 1e-12 relative slack for rounding.
inline bool check_submodular(const CostFunction& g, std::span<const double> grid) {
  if (grid.size() < 2) throw DomainError("check_submodular needs at least two grid points");
  if (!std::is_sorted(grid.begin(), grid.end())) throw DomainError("check_submodular needs a sorted grid");
  const std::size_t n = grid.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      for (std::size_t c = b; c < n; ++c) {
        for (std::size_t d = c + 1; d < n; ++d) {
          const double x = grid[a], xp = grid[b], y = grid[c], yp = grid[d];
          if (!(x < xp && xp <= y && y < yp)) continue;
          const double lhs = g(x, y) + g(xp, yp);
          const double rhs = g(x, yp) + g(xp, y);
          const double slack = 1e-12 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
          if (lhs > rhs + slack) return false;
        }
      }
    }
  }
  return true;
}

/// Applies phi to both coordinates of every support point.
inline Coupling transform_coupling(const Coupling& p, const MonotoneMap& phi) {
  std::vector<SupportPoint> pts;
  pts.reserve(p.size());
  for (const SupportPoint& s : p.points()) pts.push_back({phi.apply(s.x), phi.apply(s.y), s.mass});
  return Coupling(std::move(pts));
}

/// P((-inf, x] x (-inf, y]).
inline Rational coupling_cdf(const Coupling& p, double x, double y) {
  Rational total = 0;
  for (const SupportPoint& s : p.points()) {
    if (s.x > x) break;
    if (s.y <= y) total += s.mass;
  }
  return total;
}

}  // namespace dirot
