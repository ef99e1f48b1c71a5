#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "dirot/errors.hpp"
#include "dirot/measures.hpp"
#include "dirot/rational.hpp"

namespace dirot {

struct PointMass {
  Rational at;
  Rational mass;
  bool operator==(const PointMass&) const = default;
};

/// Sum of finitely many atoms and a piecewise-constant density, all in exact
/// coordinates. This is the common currency of the general coupling path:
/// identity parts, kernel destinations and both marginal kinds convert to it.
class MixedMeasure {
 public:
  MixedMeasure() = default;

  MixedMeasure(std::vector<PointMass> atoms, PLMeasure continuous) : continuous_(std::move(continuous)) {
    std::sort(atoms.begin(), atoms.end(), [](const PointMass& a, const PointMass& b) { return a.at < b.at; });
    for (PointMass& a : atoms) {
      if (a.mass < 0) throw DomainError("negative atom mass");
      if (!atoms_.empty() && atoms_.back().at == a.at) {
        atoms_.back().mass += a.mass;
      } else {
        atoms_.push_back(std::move(a));
      }
    }
    std::erase_if(atoms_, [](const PointMass& a) { return a.mass == 0; });
  }

  explicit MixedMeasure(const DiscreteMeasure& m) {
    for (const Atom& a : m.atoms()) atoms_.push_back({exact(a.location), a.mass});
  }

  explicit MixedMeasure(PLMeasure m) : continuous_(std::move(m)) {}

  const std::vector<PointMass>& atoms() const { return atoms_; }
  const PLMeasure& continuous() const { return continuous_; }
  bool is_atomless() const { return atoms_.empty(); }
  bool is_discrete() const { return continuous_.empty(); }
  bool empty() const { return atoms_.empty() && continuous_.empty(); }

  Rational atom_mass() const {
    Rational s = 0;
    for (const PointMass& a : atoms_) s += a.mass;
    return s;
  }
  Rational total_mass() const { return atom_mass() + continuous_.total_mass(); }

  Rational mass_at(const Rational& x) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                               [](const PointMass& a, const Rational& v) { return a.at < v; });
    return (it != atoms_.end() && it->at == x) ? it->mass : Rational(0);
  }

  /// m((-inf, x]).
  Rational cdf(const Rational& x) const {
    Rational total = continuous_.cdf(x);
    for (const PointMass& a : atoms_) {
      if (a.at > x) break;
      total += a.mass;
    }
    return total;
  }

  /// m((-inf, x)).
  Rational cdf_left(const Rational& x) const { return cdf(x) - mass_at(x); }

  /// Atom locations and density knots, sorted and unique.
  std::vector<Rational> breakpoints() const {
    std::vector<Rational> out;
    for (const PointMass& a : atoms_) out.push_back(a.at);
    for (const Knot& k : continuous_.knots()) out.push_back(k.location);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Discrete view; every atom location must be an exact double.
  DiscreteMeasure to_discrete() const {
    if (!continuous_.empty()) throw DomainError("measure has an atomless part");
    std::vector<Atom> out;
    for (const PointMass& a : atoms_) {
      const double d = to_double(a.at);
      if (Rational(d) != a.at) throw DomainError("atom location is not representable as a double");
      out.push_back({d, a.mass});
    }
    return DiscreteMeasure(std::move(out));
  }

  bool operator==(const MixedMeasure&) const = default;

  friend MixedMeasure operator+(const MixedMeasure& a, const MixedMeasure& b) {
    std::vector<PointMass> atoms = a.atoms_;
    atoms.insert(atoms.end(), b.atoms_.begin(), b.atoms_.end());
    PLMeasure sum = detail::combine_densities(a.continuous_, b.continuous_,
                                              [](const Rational& u, const Rational& v, const Rational&, const Rational&) {
                                                return Rational(u + v);
                                              });
    return MixedMeasure(std::move(atoms), std::move(sum));
  }

 private:
  std::vector<PointMass> atoms_;
  PLMeasure continuous_;
};

inline MixedMeasure common_part(const MixedMeasure& mu, const MixedMeasure& nu) {
  std::vector<PointMass> atoms;
  for (const PointMass& a : mu.atoms()) {
    const Rational other = nu.mass_at(a.at);
    if (other > 0) atoms.push_back({a.at, a.mass < other ? a.mass : other});
  }
  return MixedMeasure(std::move(atoms), common_part(mu.continuous(), nu.continuous()));
}

inline MixedMeasure subtract(const MixedMeasure& mu, const MixedMeasure& theta) {
  std::vector<PointMass> atoms = mu.atoms();
  for (const PointMass& t : theta.atoms()) {
    auto it = std::find_if(atoms.begin(), atoms.end(), [&](const PointMass& a) { return a.at == t.at; });
    if (it == atoms.end() || it->mass < t.mass) {
      throw DomainError("subtract: theta is not below mu at " + format_double(to_double(t.at)));
    }
    it->mass -= t.mass;
  }
  return MixedMeasure(std::move(atoms), subtract(mu.continuous(), theta.continuous()));
}

/// True when mu and nu share no mass.
inline bool mutually_singular(const MixedMeasure& mu, const MixedMeasure& nu) {
  return common_part(mu, nu).empty();
}

inline Rational mean(const MixedMeasure& m) {
  Rational s = mean(m.continuous());
  for (const PointMass& a : m.atoms()) s += a.mass * a.at;
  return s;
}

/// Integral of (y - c)^2 against m.
inline Rational second_moment_about(const MixedMeasure& m, const Rational& c) {
  Rational s = 0;
  for (const PointMass& a : m.atoms()) s += a.mass * (a.at - c) * (a.at - c);
  for (const Segment& seg : m.continuous().segments()) {
    const Rational u = seg.hi - c, l = seg.lo - c;
    s += seg.density * (u * u * u - l * l * l) / 3;
  }
  return s;
}

/// Affine piece of a quantile function: Q(u) = value_at_lo + slope * (u - u_lo)
/// on the level interval (u_lo, u_hi].
struct QuantilePiece {
  Rational u_lo;
  Rational u_hi;
  Rational value_at_lo;
  Rational slope;
};

/// Quantile function of m as affine pieces over (0, mass].
inline std::vector<QuantilePiece> quantile_pieces(const MixedMeasure& m) {
  struct Part {
    Rational lo;
    Rational hi;
    Rational density;  // 0 marks an atom at lo
    Rational mass;
  };
  std::vector<Part> parts;
  for (const PointMass& a : m.atoms()) parts.push_back({a.at, a.at, 0, a.mass});
  for (const Segment& s : m.continuous().segments()) parts.push_back({s.lo, s.hi, s.density, s.density * (s.hi - s.lo)});
  std::sort(parts.begin(), parts.end(), [](const Part& a, const Part& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.density == 0 && b.density != 0);
  });
  std::vector<QuantilePiece> out;
  Rational level = 0;
  for (const Part& p : parts) {
    if (p.density == 0) {
      out.push_back({level, level + p.mass, p.lo, 0});
    } else {
      out.push_back({level, level + p.mass, p.lo, Rational(1) / p.density});
    }
    level += p.mass;
  }
  return out;
}

/// Integral over levels of (Q_nu(u) - Q_mu(u))^2: the second moment of the gap
/// under the comonotone coupling.
inline Rational comonotone_squared_gap(const MixedMeasure& mu, const MixedMeasure& nu) {
  if (mu.total_mass() != nu.total_mass()) throw DomainError("comonotone coupling requires equal masses");
  const auto qa = quantile_pieces(mu);
  const auto qb = quantile_pieces(nu);
  std::vector<Rational> levels;
  for (const auto& q : qa) levels.push_back(q.u_hi);
  for (const auto& q : qb) levels.push_back(q.u_hi);
  levels.push_back(0);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  Rational total = 0;
  std::size_t ia = 0, ib = 0;
  for (std::size_t k = 1; k < levels.size(); ++k) {
    const Rational& lo = levels[k - 1];
    const Rational& hi = levels[k];
    while (qa[ia].u_hi < hi) ++ia;
    while (qb[ib].u_hi < hi) ++ib;
    // gap(u) = c0 + c1 * (u - lo)
    const Rational a0 = qa[ia].value_at_lo + qa[ia].slope * (lo - qa[ia].u_lo);
    const Rational b0 = qb[ib].value_at_lo + qb[ib].slope * (lo - qb[ib].u_lo);
    const Rational c0 = b0 - a0;
    const Rational c1 = qb[ib].slope - qa[ia].slope;
    const Rational w = hi - lo;
    total += c0 * c0 * w + c0 * c1 * w * w + c1 * c1 * w * w * w / 3;
  }
  return total;
}

}  // namespace dirot
