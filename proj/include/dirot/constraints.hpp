#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dirot/coupling.hpp"
#include "dirot/errors.hpp"
#include "dirot/greedy.hpp"
#include "dirot/measures.hpp"
#include "dirot/mixed_measure.hpp"
#include "dirot/monotone_map.hpp"
#include "dirot/rational.hpp"
#include "dirot/transport_map.hpp"

namespace dirot {

/// Y >= X + D(X) with D piecewise linear through the given breakpoints and
/// constant beyond them. Z(x) = x + D(x) must be strictly increasing.
class ConeConstraint {
 public:
  ConeConstraint() = default;

  explicit ConeConstraint(std::vector<std::pair<Rational, Rational>> breakpoints) : d_(std::move(breakpoints)) {
    std::sort(d_.begin(), d_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<MonotoneMap::MapKnot> knots;
    for (std::size_t i = 0; i < d_.size(); ++i) {
      if (i > 0) {
        if (d_[i].first == d_[i - 1].first) throw ConstraintError("displacement: duplicate breakpoint");
        const Rational slope = (d_[i].second - d_[i - 1].second) / (d_[i].first - d_[i - 1].first);
        if (slope <= -1) {
          throw ConstraintError("displacement slope must exceed -1 so that x + D(x) is strictly increasing");
        }
      }
      const Rational z = d_[i].first + d_[i].second;
      knots.push_back({d_[i].first, z, z});
    }
    z_ = MonotoneMap(std::move(knots), 1, 1);
  }

  static ConeConstraint constant(const Rational& d) { return ConeConstraint({{Rational(0), d}}); }

  const std::vector<std::pair<Rational, Rational>>& breakpoints() const { return d_; }
  const MonotoneMap& z() const { return z_; }

  Rational displacement(const Rational& x) const { return z_(x) - x; }

  bool admits(double x, double y) const { return exact(y) >= z_(exact(x)); }

 private:
  std::vector<std::pair<Rational, Rational>> d_;
  MonotoneMap z_;
};

/// Optimal coupling under Y >= X + D(X) for discrete marginals: origins are
/// moved to Z(x), coupled directionally, and moved back.
inline Coupling couple_cone(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const ConeConstraint& c) {
  if (mu.total_mass() != nu.total_mass()) throw DomainError("couple_cone: marginals must have equal mass");
  // Rounding Z(x) up to a double keeps "y >= Z(x)" exact for double y.
  std::map<double, double> back;
  std::vector<Atom> moved;
  for (const Atom& a : mu.atoms()) {
    const double z = to_double_up(c.z()(exact(a.location)));
    if (!back.emplace(z, a.location).second) {
      throw ConstraintError("couple_cone: two origins collide after rounding x + D(x) to double precision");
    }
    moved.push_back({z, a.mass});
  }
  const DiscreteMeasure shifted(std::move(moved));
  if (auto bad = dominance_violation(shifted, nu)) {
    throw DominanceError("couple_cone: shifted first marginal is not stochastically below the second", *bad);
  }
  const Coupling p = couple(shifted, nu);
  std::vector<SupportPoint> pts;
  for (const SupportPoint& s : p.points()) {
    const double x = back.at(s.x);
    if (!c.admits(x, s.y)) throw EvaluationError("couple_cone: output violates the constraint");
    pts.push_back({x, s.y, s.mass});
  }
  return Coupling(std::move(pts));
}

namespace detail {
struct LocalAffine {
  Rational x_lo, x_hi;
  Rational z0, slope;  // z = z0 + slope * x
};

/// Splits (p, q) in z coordinates at the images of Z's knots and returns the
/// preimage pieces with Z's local affine form.
inline std::vector<LocalAffine> preimage_pieces(const MonotoneMap& z, const Rational& p, const Rational& q) {
  std::vector<Rational> cuts{p};
  for (const auto& k : z.knots()) {
    if (k.left > p && k.left < q) cuts.push_back(k.left);
  }
  cuts.push_back(q);
  std::vector<LocalAffine> out;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const Rational mid = (cuts[i - 1] + cuts[i]) / 2;
    const Rational xm = z.inverse(mid);
    const Rational s = z.slope_right_of(xm);
    out.push_back({z.inverse(cuts[i - 1]), z.inverse(cuts[i]), mid - s * xm, s});
  }
  return out;
}
}  // namespace detail

/// Cone-constrained coupling for arbitrary marginals (continuous Z only).
inline KernelCoupling couple_cone(const MixedMeasure& mu, const MixedMeasure& nu, const ConeConstraint& c) {
  const MonotoneMap& z = c.z();
  std::vector<PointMass> atoms;
  for (const PointMass& a : mu.atoms()) atoms.push_back({z(a.at), a.mass});
  const MixedMeasure shifted(std::move(atoms), push_forward(mu.continuous(), z));
  if (shifted.total_mass() != nu.total_mass()) throw DomainError("couple_cone: marginals must have equal mass");
  KernelCoupling inner;
  try {
    inner = couple_general(shifted, nu);
  } catch (const DominanceError& e) {
    throw DominanceError(std::string("couple_cone: ") + e.what(), e.location());
  }
  KernelCoupling out;
  for (const PointMass& a : inner.identity.atoms()) {
    out.atom_rows.push_back({z.inverse(a.at), a.mass, MixedMeasure({{a.at, a.mass}}, PLMeasure())});
  }
  for (const Segment& s : inner.identity.continuous().segments()) {
    for (const auto& piece : detail::preimage_pieces(z, s.lo, s.hi)) {
      out.map.push_back({piece.x_lo, piece.x_hi, s.density * piece.slope, piece.z0, piece.slope});
    }
  }
  for (const MapPiece& m : inner.map) {
    for (const auto& piece : detail::preimage_pieces(z, m.lo, m.hi)) {
      out.map.push_back({piece.x_lo, piece.x_hi, m.density * piece.slope, m.intercept + m.slope * piece.z0,
                         m.slope * piece.slope});
    }
  }
  for (AtomRow& r : inner.atom_rows) {
    r.origin = z.inverse(r.origin);
    out.atom_rows.push_back(std::move(r));
  }
  std::sort(out.map.begin(), out.map.end(), [](const MapPiece& a, const MapPiece& b) { return a.lo < b.lo; });
  std::sort(out.atom_rows.begin(), out.atom_rows.end(),
            [](const AtomRow& a, const AtomRow& b) { return a.origin < b.origin; });
  std::vector<AtomRow> rows;
  for (AtomRow& r : out.atom_rows) {
    if (!rows.empty() && rows.back().origin == r.origin) {
      rows.back().mass += r.mass;
      rows.back().destination = rows.back().destination + r.destination;
    } else {
      rows.push_back(std::move(r));
    }
  }
  out.atom_rows = std::move(rows);
  return out;
}

}  // namespace dirot
