#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dirot/errors.hpp"
#include "dirot/rational.hpp"

namespace dirot {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Interval on the extended line. Infinite endpoints are always open.
struct Interval {
  double lo = -kInfinity;
  double hi = kInfinity;
  bool lo_closed = false;
  bool hi_closed = false;

  static Interval above(double x) { return {x, kInfinity, false, false}; }           // (x, inf)
  static Interval at_or_above(double x) { return {x, kInfinity, true, false}; }      // [x, inf)
  static Interval below(double x) { return {-kInfinity, x, false, false}; }          // (-inf, x)
  static Interval at_or_below(double x) { return {-kInfinity, x, false, true}; }     // (-inf, x]
  static Interval closed(double a, double b) { return {a, b, true, true}; }

  bool contains(double x) const {
    const bool left = lo_closed ? x >= lo : x > lo;
    const bool right = hi_closed ? x <= hi : x < hi;
    return left && right;
  }
};

// ---------------------------------------------------------------------------
// Discrete measures

struct Atom {
  double location;
  Rational mass;
  bool operator==(const Atom&) const = default;
};

/// Finite sum of weighted Dirac masses. Locations are strictly increasing and
/// all masses positive; equal locations are merged on construction. The zero
/// measure (no atoms) is a valid value.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  explicit DiscreteMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    for (const Atom& a : atoms_) {
      if (!std::isfinite(a.location)) throw DomainError("atom location must be finite");
      if (a.mass < 0) throw DomainError("atom mass must be nonnegative");
    }
    std::stable_sort(atoms_.begin(), atoms_.end(),
                     [](const Atom& a, const Atom& b) { return a.location < b.location; });
    std::vector<Atom> merged;
    merged.reserve(atoms_.size());
    for (Atom& a : atoms_) {
      if (!merged.empty() && merged.back().location == a.location) {
        merged.back().mass += a.mass;
      } else {
        merged.push_back(std::move(a));
      }
    }
    std::erase_if(merged, [](const Atom& a) { return a.mass == 0; });
    atoms_ = std::move(merged);
  }

  static DiscreteMeasure dirac(double x, const Rational& mass = Rational(1)) {
    return DiscreteMeasure({{x, mass}});
  }

  /// Empirical measure: mass 1/n at each sample, duplicates summed.
  static DiscreteMeasure from_samples(std::span<const double> samples) {
    if (samples.empty()) throw DomainError("empty sample");
    const Rational w(1, static_cast<unsigned long>(samples.size()));
    std::vector<Atom> atoms;
    atoms.reserve(samples.size());
    for (double s : samples) atoms.push_back({s, w});
    return DiscreteMeasure(std::move(atoms));
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  Rational total_mass() const {
    Rational total = 0;
    for (const Atom& a : atoms_) total += a.mass;
    return total;
  }

  Rational mass_at(double x) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                               [](const Atom& a, double v) { return a.location < v; });
    return (it != atoms_.end() && it->location == x) ? it->mass : Rational(0);
  }

  std::vector<double> locations() const {
    std::vector<double> out;
    out.reserve(atoms_.size());
    for (const Atom& a : atoms_) out.push_back(a.location);
    return out;
  }

  bool operator==(const DiscreteMeasure&) const = default;

  friend DiscreteMeasure operator+(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    std::vector<Atom> atoms = a.atoms_;
    atoms.insert(atoms.end(), b.atoms_.begin(), b.atoms_.end());
    return DiscreteMeasure(std::move(atoms));
  }

 private:
  std::vector<Atom> atoms_;
};

/// m((-inf, x]).
inline Rational cdf_eval(const DiscreteMeasure& m, double x) {
  Rational total = 0;
  for (const Atom& a : m.atoms()) {
    if (a.location > x) break;
    total += a.mass;
  }
  return total;
}

/// m((-inf, x)).
inline Rational cdf_left(const DiscreteMeasure& m, double x) {
  Rational total = 0;
  for (const Atom& a : m.atoms()) {
    if (a.location >= x) break;
    total += a.mass;
  }
  return total;
}

/// Generalized inverse inf{x : F(x) >= p} for 0 < p <= mass.
inline double quantile(const DiscreteMeasure& m, const Rational& p) {
  if (p <= 0 || p > m.total_mass()) throw DomainError("quantile level outside (0, mass]");
  Rational running = 0;
  for (const Atom& a : m.atoms()) {
    running += a.mass;
    if (running >= p) return a.location;
  }
  return m.atoms().back().location;  // unreachable
}

/// First location where F_mu < F_nu, if any. Masses must agree.
inline std::optional<double> dominance_violation(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.total_mass() != nu.total_mass()) throw DomainError("stochastic order requires equal masses");
  std::vector<double> grid = mu.locations();
  const auto nl = nu.locations();
  grid.insert(grid.end(), nl.begin(), nl.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  Rational fm = 0, fn = 0;
  std::size_t i = 0, j = 0;
  for (double x : grid) {
    while (i < mu.size() && mu.atoms()[i].location <= x) fm += mu.atoms()[i++].mass;
    while (j < nu.size() && nu.atoms()[j].location <= x) fn += nu.atoms()[j++].mass;
    if (fm < fn) return x;
  }
  return std::nullopt;
}

/// mu <=_st nu, i.e. F_mu >= F_nu everywhere.
inline bool stochastic_dominates(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  return !dominance_violation(mu, nu).has_value();
}

/// Largest measure below both arguments.
inline DiscreteMeasure common_part(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  std::vector<Atom> out;
  std::size_t j = 0;
  for (const Atom& a : mu.atoms()) {
    while (j < nu.size() && nu.atoms()[j].location < a.location) ++j;
    if (j < nu.size() && nu.atoms()[j].location == a.location) {
      out.push_back({a.location, a.mass < nu.atoms()[j].mass ? a.mass : nu.atoms()[j].mass});
    }
  }
  return DiscreteMeasure(std::move(out));
}

/// mu - theta; requires theta <= mu atomwise.
inline DiscreteMeasure subtract(const DiscreteMeasure& mu, const DiscreteMeasure& theta) {
  std::vector<Atom> out = mu.atoms();
  std::size_t i = 0;
  for (const Atom& t : theta.atoms()) {
    while (i < out.size() && out[i].location < t.location) ++i;
    if (i == out.size() || out[i].location != t.location || out[i].mass < t.mass) {
      throw DomainError("subtract: theta is not below mu at " + format_double(t.location));
    }
    out[i].mass -= t.mass;
  }
  return DiscreteMeasure(std::move(out));
}

inline DiscreteMeasure restrict(const DiscreteMeasure& mu, const Interval& interval) {
  std::vector<Atom> out;
  for (const Atom& a : mu.atoms()) {
    if (interval.contains(a.location)) out.push_back(a);
  }
  return DiscreteMeasure(std::move(out));
}

/// theta <= nu atomwise.
inline bool is_below(const DiscreteMeasure& theta, const DiscreteMeasure& nu) {
  for (const Atom& a : theta.atoms()) {
    if (nu.mass_at(a.location) < a.mass) return false;
  }
  return true;
}

/// First moment, not divided by the total mass.
inline Rational mean(const DiscreteMeasure& m) {
  Rational s = 0;
  for (const Atom& a : m.atoms()) s += a.mass * exact(a.location);
  return s;
}

/// Image of m under a location map f (which should be strictly increasing
/// for the result to keep the atom structure).
template <class Fn>
DiscreteMeasure push_forward(const DiscreteMeasure& m, Fn&& f) {
  std::vector<Atom> out;
  out.reserve(m.size());
  for (const Atom& a : m.atoms()) out.push_back({static_cast<double>(f(a.location)), a.mass});
  return DiscreteMeasure(std::move(out));
}

// ---------------------------------------------------------------------------
// Piecewise-linear (atomless) measures

struct Knot {
  Rational location;
  Rational cdf;
  bool operator==(const Knot&) const = default;
};

/// Open interval (lo, hi) carrying constant density.
struct Segment {
  Rational lo;
  Rational hi;
  Rational density;
  bool operator==(const Segment&) const = default;
};

/// Atomless measure whose cdf is continuous and piecewise linear, i.e. a
/// piecewise-constant density. Stored as the knots of the cdf in canonical
/// form: only points where the slope changes are kept, the first knot has
/// cdf 0 and the last carries the total mass. The zero measure has no knots.
class PLMeasure {
 public:
  PLMeasure() = default;

  explicit PLMeasure(std::vector<Knot> knots) {
    for (std::size_t i = 1; i < knots.size(); ++i) {
      if (knots[i].location <= knots[i - 1].location) {
        throw DomainError("PL breakpoints must be strictly increasing");
      }
      if (knots[i].cdf < knots[i - 1].cdf) throw DomainError("PL cdf must be nondecreasing");
    }
    if (!knots.empty() && knots.front().cdf != 0) {
      throw DomainError("PL cdf must start at 0 (no atoms)");
    }
    knots_ = canonical(std::move(knots));
  }

  static PLMeasure uniform(const Rational& a, const Rational& b, const Rational& mass = Rational(1)) {
    if (!(a < b)) throw DomainError("uniform needs a < b");
    return PLMeasure({{a, 0}, {b, mass}});
  }
  static PLMeasure uniform(double a, double b, const Rational& mass = Rational(1)) {
    return uniform(exact(a), exact(b), mass);
  }

  /// Builds from disjoint positive-density segments (in any order).
  static PLMeasure from_segments(std::vector<Segment> segments) {
    std::erase_if(segments, [](const Segment& s) { return s.density == 0 || s.lo == s.hi; });
    std::sort(segments.begin(), segments.end(), [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
    std::vector<Knot> knots;
    Rational running = 0;
    for (const Segment& s : segments) {
      if (s.density < 0 || s.hi < s.lo) throw DomainError("segment with negative density or length");
      if (!knots.empty() && s.lo < knots.back().location) throw DomainError("overlapping segments");
      if (knots.empty() || knots.back().location != s.lo) knots.push_back({s.lo, running});
      running += s.density * (s.hi - s.lo);
      knots.push_back({s.hi, running});
    }
    return PLMeasure(std::move(knots));
  }

  /// Sum of possibly overlapping positive-density segments.
  static PLMeasure sum_of_segments(const std::vector<Segment>& segments) {
    std::vector<Rational> cuts;
    for (const Segment& s : segments) {
      if (s.density < 0 || s.hi < s.lo) throw DomainError("segment with negative density or length");
      cuts.push_back(s.lo);
      cuts.push_back(s.hi);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<Segment> pieces;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
      Rational density = 0;
      for (const Segment& s : segments) {
        if (s.lo <= cuts[i - 1] && cuts[i] <= s.hi) density += s.density;
      }
      pieces.push_back({cuts[i - 1], cuts[i], density});
    }
    return from_segments(std::move(pieces));
  }

  const std::vector<Knot>& knots() const { return knots_; }
  bool empty() const { return knots_.empty(); }
  Rational total_mass() const { return knots_.empty() ? Rational(0) : knots_.back().cdf; }

  std::vector<Segment> segments() const {
    std::vector<Segment> out;
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      const Rational mass = knots_[i].cdf - knots_[i - 1].cdf;
      if (mass == 0) continue;
      out.push_back({knots_[i - 1].location, knots_[i].location,
                     mass / (knots_[i].location - knots_[i - 1].location)});
    }
    return out;
  }

  Rational cdf(const Rational& x) const {
    if (knots_.empty() || x <= knots_.front().location) return 0;
    if (x >= knots_.back().location) return knots_.back().cdf;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                               [](const Rational& v, const Knot& k) { return v < k.location; });
    const Knot& right = *it;
    const Knot& left = *(it - 1);
    return left.cdf + (right.cdf - left.cdf) * (x - left.location) / (right.location - left.location);
  }

  /// Density on the open piece containing x (0 outside the support and at knots
  /// where it is ambiguous, the right-hand value is returned).
  Rational density_right_of(const Rational& x) const {
    if (knots_.empty() || x < knots_.front().location || x >= knots_.back().location) return 0;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                               [](const Rational& v, const Knot& k) { return v < k.location; });
    const Knot& right = *it;
    const Knot& left = *(it - 1);
    return (right.cdf - left.cdf) / (right.location - left.location);
  }

  bool operator==(const PLMeasure&) const = default;

 private:
  static std::vector<Knot> canonical(std::vector<Knot> knots) {
    if (knots.size() < 2) return {};
    // Trim flat zero-mass head and full-mass tail.
    std::size_t first = 0;
    while (first + 1 < knots.size() && knots[first + 1].cdf == 0) ++first;
    std::size_t last = knots.size() - 1;
    while (last > first && knots[last - 1].cdf == knots.back().cdf) --last;
    if (first >= last) return {};
    std::vector<Knot> out;
    for (std::size_t i = first; i <= last; ++i) {
      if (out.size() >= 2) {
        const Knot& a = out[out.size() - 2];
        const Knot& b = out.back();
        const Knot& c = knots[i];
        // collinear: drop the middle knot
        if ((b.cdf - a.cdf) * (c.location - b.location) == (c.cdf - b.cdf) * (b.location - a.location)) {
          out.back() = c;
          continue;
        }
      }
      out.push_back(knots[i]);
    }
    return out;
  }

  std::vector<Knot> knots_;
};

inline Rational cdf_eval(const PLMeasure& m, const Rational& x) { return m.cdf(x); }
inline Rational cdf_eval(const PLMeasure& m, double x) {
  if (x == kInfinity) return m.total_mass();
  if (x == -kInfinity) return 0;
  return m.cdf(exact(x));
}

inline Rational quantile(const PLMeasure& m, const Rational& p) {
  if (p <= 0 || p > m.total_mass()) throw DomainError("quantile level outside (0, mass]");
  const auto& k = m.knots();
  for (std::size_t i = 1; i < k.size(); ++i) {
    if (k[i].cdf >= p) {
      return k[i - 1].location + (p - k[i - 1].cdf) * (k[i].location - k[i - 1].location) / (k[i].cdf - k[i - 1].cdf);
    }
  }
  return k.back().location;  // unreachable
}

namespace detail {
inline std::vector<Rational> merged_locations(const PLMeasure& a, const PLMeasure& b) {
  std::vector<Rational> grid;
  for (const Knot& k : a.knots()) grid.push_back(k.location);
  for (const Knot& k : b.knots()) grid.push_back(k.location);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

// Per-piece densities of a and b on the merged grid, combined by `op`.
template <class Op>
PLMeasure combine_densities(const PLMeasure& a, const PLMeasure& b, Op op) {
  const auto grid = merged_locations(a, b);
  std::vector<Segment> segs;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const Rational mid = (grid[i - 1] + grid[i]) / 2;
    const Rational d = op(a.density_right_of(mid), b.density_right_of(mid), grid[i - 1], grid[i]);
    if (d != 0) segs.push_back({grid[i - 1], grid[i], d});
  }
  return PLMeasure::from_segments(std::move(segs));
}
}  // namespace detail

/// First location where F_mu < F_nu, if any (checked at the merged knots,
/// which is exhaustive for piecewise-linear cdfs).
inline std::optional<Rational> dominance_violation(const PLMeasure& mu, const PLMeasure& nu) {
  if (mu.total_mass() != nu.total_mass()) throw DomainError("stochastic order requires equal masses");
  for (const Rational& x : detail::merged_locations(mu, nu)) {
    if (mu.cdf(x) < nu.cdf(x)) return x;
  }
  return std::nullopt;
}

inline bool stochastic_dominates(const PLMeasure& mu, const PLMeasure& nu) {
  return !dominance_violation(mu, nu).has_value();
}

inline PLMeasure common_part(const PLMeasure& mu, const PLMeasure& nu) {
  return detail::combine_densities(mu, nu, [](const Rational& a, const Rational& b, const Rational&, const Rational&) {
    return a < b ? a : b;
  });
}

inline PLMeasure subtract(const PLMeasure& mu, const PLMeasure& theta) {
  return detail::combine_densities(mu, theta, [](const Rational& a, const Rational& b, const Rational& lo, const Rational&) {
    if (a < b) throw DomainError("subtract: theta is not below mu near " + format_double(to_double(lo)));
    return Rational(a - b);
  });
}

inline PLMeasure restrict(const PLMeasure& mu, const Interval& interval) {
  std::vector<Segment> out;
  for (Segment s : mu.segments()) {
    if (std::isfinite(interval.lo) && s.lo < exact(interval.lo)) s.lo = exact(interval.lo);
    if (std::isfinite(interval.hi) && s.hi > exact(interval.hi)) s.hi = exact(interval.hi);
    if (s.lo < s.hi) out.push_back(s);
  }
  return PLMeasure::from_segments(std::move(out));
}

inline bool is_below(const PLMeasure& theta, const PLMeasure& nu) {
  const auto grid = detail::merged_locations(theta, nu);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const Rational mid = (grid[i - 1] + grid[i]) / 2;
    if (theta.density_right_of(mid) > nu.density_right_of(mid)) return false;
  }
  return true;
}

/// First moment, not divided by the total mass.
inline Rational mean(const PLMeasure& m) {
  Rational s = 0;
  for (const Segment& seg : m.segments()) s += seg.density * (seg.hi * seg.hi - seg.lo * seg.lo) / 2;
  return s;
}

}  // namespace dirot
