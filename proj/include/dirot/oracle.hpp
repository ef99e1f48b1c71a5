#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "dirot/coupling.hpp"
#include "dirot/errors.hpp"
#include "dirot/lp.hpp"
#include "dirot/measures.hpp"
#include "dirot/rational.hpp"

namespace dirot {

/// Transportation polytope with forbidden cells.
struct TransportPolytopeInstance {
  std::vector<double> origins;
  std::vector<double> destinations;
  std::vector<Rational> row_masses;
  std::vector<Rational> col_masses;
  std::function<bool(std::size_t, std::size_t)> forbidden;

  /// Cells (i, j) with allowed(x_i, y_j) false are forbidden.
  static TransportPolytopeInstance with_predicate(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                                  std::function<bool(double, double)> allowed) {
    TransportPolytopeInstance t;
    for (const Atom& a : mu.atoms()) {
      t.origins.push_back(a.location);
      t.row_masses.push_back(a.mass);
    }
    for (const Atom& a : nu.atoms()) {
      t.destinations.push_back(a.location);
      t.col_masses.push_back(a.mass);
    }
    t.forbidden = [xs = t.origins, ys = t.destinations, allowed = std::move(allowed)](std::size_t i, std::size_t j) {
      return !allowed(xs[i], ys[j]);
    };
    t.validate();
    return t;
  }

  static TransportPolytopeInstance directional(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    return with_predicate(mu, nu, [](double x, double y) { return y >= x; });
  }

  static TransportPolytopeInstance unconstrained(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    return with_predicate(mu, nu, [](double, double) { return true; });
  }

  /// Equal unit masses 1/n per listed location; repeated locations stay separate.
  static TransportPolytopeInstance directional_samples(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size() || xs.empty()) throw DomainError("sample lists must be nonempty and of equal length");
    TransportPolytopeInstance t;
    const Rational w = make_rational(1, static_cast<long>(xs.size()));
    t.origins = std::move(xs);
    t.destinations = std::move(ys);
    t.row_masses.assign(t.origins.size(), w);
    t.col_masses.assign(t.destinations.size(), w);
    t.forbidden = [xs = t.origins, ys = t.destinations](std::size_t i, std::size_t j) { return ys[j] < xs[i]; };
    return t;
  }

  void validate() const {
    const Rational r = std::accumulate(row_masses.begin(), row_masses.end(), Rational(0));
    const Rational c = std::accumulate(col_masses.begin(), col_masses.end(), Rational(0));
    if (r != c) throw DomainError("transport instance: row and column masses differ");
  }
};

enum class Sense { maximize, minimize };

struct LpResult {
  Rational value;
  Coupling plan;
};

/// Phase one is solved once per instance; objectives are re-optimized from
/// the stored feasible basis.
class TransportLP {
 public:
  explicit TransportLP(TransportPolytopeInstance inst) : inst_(std::move(inst)), lp_(build()) {}

  bool feasible() const { return lp_.feasible(); }
  const TransportPolytopeInstance& instance() const { return inst_; }

  LpResult optimal(const CostFunction& g, Sense sense) const {
    std::vector<Rational> c;
    c.reserve(cells_.size());
    for (const auto& [i, j] : cells_) c.push_back(exact(g(inst_.origins[i], inst_.destinations[j])));
    return solve(c, sense);
  }

  /// Least mass any feasible plan can put in (-inf, x] x (-inf, y].
  Rational min_cdf(double x, double y) const {
    std::vector<Rational> c;
    c.reserve(cells_.size());
    for (const auto& [i, j] : cells_) {
      c.push_back(inst_.origins[i] <= x && inst_.destinations[j] <= y ? 1 : 0);
    }
    return solve(c, Sense::minimize).value;
  }

  /// True iff the polytope is a single point (every cell mass is pinned).
  bool is_singleton() const {
    std::vector<Rational> c(cells_.size());
    for (std::size_t k = 0; k < cells_.size(); ++k) {
      c.assign(cells_.size(), 0);
      c[k] = 1;
      if (lp_.minimize(c).value != lp_.maximize(c).value) return false;
    }
    return true;
  }

 private:
  StandardFormLP build() {
    inst_.validate();
    const std::size_t n = inst_.origins.size(), m = inst_.destinations.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (!inst_.forbidden(i, j)) cells_.emplace_back(i, j);
      }
    }
    std::vector<std::vector<Rational>> a(n + m, std::vector<Rational>(cells_.size()));
    std::vector<Rational> b(n + m);
    for (std::size_t k = 0; k < cells_.size(); ++k) {
      a[cells_[k].first][k] = 1;
      a[n + cells_[k].second][k] = 1;
    }
    for (std::size_t i = 0; i < n; ++i) b[i] = inst_.row_masses[i];
    for (std::size_t j = 0; j < m; ++j) b[n + j] = inst_.col_masses[j];
    return StandardFormLP(std::move(a), std::move(b));
  }

  LpResult solve(const std::vector<Rational>& c, Sense sense) const {
    if (!lp_.feasible()) throw DomainError("transport instance is infeasible");
    const auto sol = sense == Sense::maximize ? lp_.maximize(c) : lp_.minimize(c);
    std::vector<SupportPoint> pts;
    for (std::size_t k = 0; k < cells_.size(); ++k) {
      if (sol.x[k] != 0) pts.push_back({inst_.origins[cells_[k].first], inst_.destinations[cells_[k].second], sol.x[k]});
    }
    return {sol.value, Coupling(std::move(pts))};
  }

  TransportPolytopeInstance inst_;
  std::vector<std::pair<std::size_t, std::size_t>> cells_;
  StandardFormLP lp_;
};

inline LpResult lp_optimal(const TransportPolytopeInstance& inst, const CostFunction& g, Sense sense) {
  return TransportLP(inst).optimal(g, sense);
}

inline Rational min_cdf(const TransportPolytopeInstance& inst, double x, double y) {
  return TransportLP(inst).min_cdf(x, y);
}

/// All plans induced by feasible permutations; requires equal unit masses
/// and at most 8 atoms per side.
inline std::vector<Coupling> enumerate_directional(const TransportPolytopeInstance& inst) {
  const std::size_t n = inst.origins.size();
  if (inst.destinations.size() != n) throw DomainError("enumerate_directional: sides must have equal length");
  if (n > 8) throw DomainError("enumerate_directional: at most 8 atoms per side");
  for (std::size_t i = 0; i < n; ++i) {
    if (inst.row_masses[i] != inst.row_masses[0] || inst.col_masses[i] != inst.row_masses[0]) {
      throw DomainError("enumerate_directional: masses must be equal");
    }
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::set<std::vector<std::pair<double, double>>> seen;
  std::vector<Coupling> out;
  if (n == 0) return out;
  do {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) ok = !inst.forbidden(i, perm[i]);
    if (!ok) continue;
    std::vector<SupportPoint> pts;
    for (std::size_t i = 0; i < n; ++i) pts.push_back({inst.origins[i], inst.destinations[perm[i]], inst.row_masses[i]});
    Coupling c(std::move(pts));
    std::vector<std::pair<double, double>> key;
    for (const SupportPoint& p : c.points()) key.emplace_back(p.x, p.y);
    if (seen.insert(std::move(key)).second) out.push_back(std::move(c));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

/// No n-tuple of support points can be re-paired within the halfplane
/// y >= x to strictly increase the sum of g. Cycle length at most 4.
inline bool check_cyclical_monotonicity(const Coupling& p, const CostFunction& g, std::size_t n) {
  if (n > 4) throw DomainError("cyclical monotonicity: cycle length at most 4");
  const auto& pts = p.points();
  if (n < 2 || pts.size() < 2) return true;
  const std::size_t k = std::min(n, pts.size());
  std::vector<std::size_t> pick(k);
  std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t depth, std::size_t start) {
    if (depth == k) {
      double base = 0;
      for (std::size_t i : pick) base += g(pts[i].x, pts[i].y);
      std::vector<std::size_t> perm(k);
      std::iota(perm.begin(), perm.end(), 0);
      while (std::next_permutation(perm.begin(), perm.end())) {
        bool feasible = true;
        double alt = 0;
        for (std::size_t i = 0; i < k && feasible; ++i) {
          const double x = pts[pick[i]].x, y = pts[pick[perm[i]]].y;
          feasible = y >= x;
          alt += g(x, y);
        }
        if (feasible && alt > base + 1e-12 * (1 + std::abs(base))) return false;
      }
      return true;
    }
    for (std::size_t i = start; i < pts.size(); ++i) {
      pick[depth] = i;
      if (!rec(depth + 1, i + 1)) return false;
    }
    return true;
  };
  return rec(0, 0);
}

/// Every theta <= nu (atomwise on nu's support) of the given mass whose atom
/// masses are multiples of 1/grid.
inline std::vector<DiscreteMeasure> enumerate_sub_measures(const DiscreteMeasure& nu, const Rational& mass, long grid) {
  if (grid <= 0) throw DomainError("mass grid must be positive");
  const Rational unit = make_rational(1, grid);
  const auto& atoms = nu.atoms();
  std::vector<DiscreteMeasure> out;
  std::vector<Atom> chosen;
  std::function<void(std::size_t, Rational)> rec = [&](std::size_t idx, Rational left) {
    if (left == 0) {
      out.emplace_back(chosen);
      return;
    }
    if (idx == atoms.size() || left < 0) return;
    for (Rational q = 0; q <= atoms[idx].mass && q <= left; q += unit) {
      if (q > 0) chosen.push_back({atoms[idx].location, q});
      rec(idx + 1, left - q);
      if (q > 0) chosen.pop_back();
    }
  };
  rec(0, mass);
  return out;
}

}  // namespace dirot
