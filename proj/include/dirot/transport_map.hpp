#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "dirot/cdf_formula.hpp"
#include "dirot/coupling.hpp"
#include "dirot/errors.hpp"
#include "dirot/measures.hpp"
#include "dirot/mixed_measure.hpp"
#include "dirot/monotone_map.hpp"
#include "dirot/rational.hpp"

namespace dirot {

// ---------------------------------------------------------------------------
// F = F_mu - F_nu for atomless marginals

struct LevelKnot {
  Rational z;
  Rational value;
  bool operator==(const LevelKnot&) const = default;
};

/// Continuous piecewise-linear F >= 0 vanishing outside its outer knots.
/// Canonical form keeps only slope changes.
class SignedPLFunction {
 public:
  SignedPLFunction() = default;

  explicit SignedPLFunction(std::vector<LevelKnot> knots) {
    for (std::size_t i = 0; i < knots.size(); ++i) {
      if (i > 0 && knots[i].z <= knots[i - 1].z) throw DomainError("F knots must be strictly increasing");
      if (knots[i].value < 0) throw DomainError("F must be nonnegative (stochastic order fails)");
    }
    if (!knots.empty() && (knots.front().value != 0 || knots.back().value != 0)) {
      throw DomainError("F must vanish at both ends");
    }
    // canonical: drop collinear interior knots and zero runs at the ends
    std::vector<LevelKnot> out;
    for (LevelKnot& k : knots) {
      if (out.size() >= 2) {
        const LevelKnot& a = out[out.size() - 2];
        const LevelKnot& b = out.back();
        if ((b.value - a.value) * (k.z - b.z) == (k.value - b.value) * (b.z - a.z)) {
          out.back() = std::move(k);
          continue;
        }
      }
      out.push_back(std::move(k));
    }
    while (out.size() >= 2 && out[1].value == 0) out.erase(out.begin());
    while (out.size() >= 2 && out[out.size() - 2].value == 0) out.pop_back();
    if (out.size() < 2) out.clear();
    knots_ = std::move(out);
  }

  const std::vector<LevelKnot>& knots() const { return knots_; }
  bool is_zero() const { return knots_.empty(); }

  Rational operator()(const Rational& z) const {
    if (knots_.empty() || z <= knots_.front().z || z >= knots_.back().z) return 0;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), z,
                               [](const Rational& v, const LevelKnot& k) { return v < k.z; });
    const LevelKnot& r = *it;
    const LevelKnot& l = *(it - 1);
    return l.value + (r.value - l.value) * (z - l.z) / (r.z - l.z);
  }

  Rational max_value() const {
    Rational m = 0;
    for (const LevelKnot& k : knots_) {
      if (k.value > m) m = k.value;
    }
    return m;
  }

  /// Smallest maximizer.
  Rational first_argmax() const {
    if (knots_.empty()) throw DomainError("F is identically zero");
    const Rational m = max_value();
    for (const LevelKnot& k : knots_) {
      if (k.value == m) return k.z;
    }
    return knots_.front().z;  // unreachable
  }

  bool is_unimodal() const {
    std::size_t i = 1;
    while (i < knots_.size() && knots_[i].value >= knots_[i - 1].value) ++i;
    while (i < knots_.size() && knots_[i].value <= knots_[i - 1].value) ++i;
    return i >= knots_.size();
  }

  /// Total variation of F.
  Rational variation() const {
    Rational v = 0;
    for (std::size_t i = 1; i < knots_.size(); ++i) v += abs(knots_[i].value - knots_[i - 1].value);
    return v;
  }

  friend SignedPLFunction operator-(const SignedPLFunction& a, const SignedPLFunction& b) {
    std::vector<Rational> zs;
    for (const auto& k : a.knots_) zs.push_back(k.z);
    for (const auto& k : b.knots_) zs.push_back(k.z);
    std::sort(zs.begin(), zs.end());
    zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
    std::vector<LevelKnot> out;
    for (const Rational& z : zs) out.push_back({z, a(z) - b(z)});
    return SignedPLFunction(std::move(out));
  }

  bool operator==(const SignedPLFunction&) const = default;

 private:
  std::vector<LevelKnot> knots_;
};

namespace detail {
inline SignedPLFunction cdf_difference(const PLMeasure& mu, const PLMeasure& nu) {
  std::vector<LevelKnot> knots;
  for (const Rational& z : merged_locations(mu, nu)) knots.push_back({z, mu.cdf(z) - nu.cdf(z)});
  return SignedPLFunction(std::move(knots));
}
}  // namespace detail

/// F = F_mu - F_nu for mutually singular atomless marginals in stochastic order.
inline SignedPLFunction build_F(const PLMeasure& mu, const PLMeasure& nu) {
  if (mu.total_mass() != nu.total_mass()) throw DomainError("build_F: marginals must have equal mass");
  if (!common_part(mu, nu).empty()) {
    throw DomainError("build_F: marginals share mass; split off the common part first");
  }
  if (auto bad = dominance_violation(mu, nu)) {
    throw DominanceError("build_F: stochastic order fails", to_double(*bad));
  }
  return detail::cdf_difference(mu, nu);
}

struct OpenInterval {
  Rational lo;
  Rational hi;
  bool operator==(const OpenInterval&) const = default;
};

/// Sets of strict increase and strict decrease of F.
struct IncreaseDecreaseSets {
  std::vector<OpenInterval> increase;
  std::vector<OpenInterval> decrease;
};

inline IncreaseDecreaseSets increase_decrease(const SignedPLFunction& f) {
  IncreaseDecreaseSets out;
  const auto& k = f.knots();
  for (std::size_t i = 1; i < k.size(); ++i) {
    const int sign = sgn(k[i].value - k[i - 1].value);
    if (sign == 0) continue;
    auto& target = sign > 0 ? out.increase : out.decrease;
    if (!target.empty() && target.back().hi == k[i - 1].z) {
      target.back().hi = k[i].z;
    } else {
      target.push_back({k[i - 1].z, k[i].z});
    }
  }
  return out;
}

/// T(x) = inf{y >= x : F(y) < F(x)}; nullopt stands for +infinity, which
/// happens exactly when F(x) = 0.
inline std::optional<Rational> t_eval(const SignedPLFunction& f, const Rational& x) {
  const Rational h = f(x);
  if (h == 0) return std::nullopt;
  const auto& k = f.knots();
  // first knot strictly right of x
  auto it = std::upper_bound(k.begin(), k.end(), x, [](const Rational& v, const LevelKnot& kn) { return v < kn.z; });
  Rational c = x;
  Rational fc = h;
  for (; it != k.end(); ++it) {
    if (it->value < h) {
      // crossing of level h on [c, it->z]; F(c) >= h here
      return c + (h - fc) * (it->z - c) / (it->value - fc);
    }
    c = it->z;
    fc = it->value;
  }
  return std::nullopt;  // unreachable: F vanishes at its last knot
}

/// x -> intercept + slope * x on the open origin interval (lo, hi), carrying
/// first-marginal density `density`.
struct MapPiece {
  Rational lo;
  Rational hi;
  Rational density;
  Rational intercept;
  Rational slope;

  Rational at(const Rational& x) const { return intercept + slope * x; }
  Rational mass() const { return density * (hi - lo); }
  bool operator==(const MapPiece&) const = default;
};

/// The map T restricted to the increasing pieces of F, where the positive
/// part of F' lives. Pieces are sorted by origin.
inline std::vector<MapPiece> map_pieces(const SignedPLFunction& f) {
  std::vector<MapPiece> out;
  const auto& k = f.knots();
  for (std::size_t i = 1; i < k.size(); ++i) {
    const Rational& a = k[i - 1].z;
    const Rational& fa = k[i - 1].value;
    const Rational& fb = k[i].value;
    if (fb <= fa) continue;
    const Rational sigma = (fb - fa) / (k[i].z - a);
    // levels (fa, fb] are served by the descending branches to the right
    Rational level = fb;  // running minimum of F on [b, c]
    for (std::size_t j = i + 1; j < k.size() && level > fa; ++j) {
      const Rational& fd = k[j].value;
      if (fd >= level) continue;
      const Rational& c = k[j - 1].z;
      const Rational& fc = k[j - 1].value;
      const Rational s = (fd - fc) / (k[j].z - c);  // negative
      const Rational band_lo = fd > fa ? fd : fa;
      const Rational x_lo = a + (band_lo - fa) / sigma;
      const Rational x_hi = a + (level - fa) / sigma;
      // T(x) = c + (F(x) - F(c)) / s with F(x) = fa + sigma (x - a)
      const Rational intercept = c + (fa - sigma * a - fc) / s;
      out.push_back({x_lo, x_hi, sigma, intercept, sigma / s});
      level = fd;
    }
  }
  std::sort(out.begin(), out.end(), [](const MapPiece& p, const MapPiece& q) { return p.lo < q.lo; });
  return out;
}

// ---------------------------------------------------------------------------
// Kernel couplings: identity part + deterministic map + atom kernels

/// Atom of the first marginal and the law its mass is sent to.
struct AtomRow {
  Rational origin;
  Rational mass;
  MixedMeasure destination;
  bool operator==(const AtomRow&) const = default;
};

/// P = id(identity) + (origin density) x delta_{T(x)} + sum_atoms mass x kernel.
struct KernelCoupling {
  MixedMeasure identity;
  std::vector<MapPiece> map;
  std::vector<AtomRow> atom_rows;

  bool operator==(const KernelCoupling&) const = default;

  MixedMeasure first_marginal() const {
    std::vector<PointMass> atoms;
    std::vector<Segment> segs;
    for (const MapPiece& p : map) segs.push_back({p.lo, p.hi, p.density});
    for (const AtomRow& r : atom_rows) atoms.push_back({r.origin, r.mass});
    return identity + MixedMeasure(std::move(atoms), PLMeasure::sum_of_segments(segs));
  }

  MixedMeasure second_marginal() const {
    std::vector<PointMass> atoms;
    std::vector<Segment> segs;
    for (const MapPiece& p : map) {
      if (p.slope == 0) {
        atoms.push_back({p.intercept, p.mass()});
      } else {
        Rational a = p.at(p.lo), b = p.at(p.hi);
        if (b < a) std::swap(a, b);
        segs.push_back({a, b, p.density / abs(p.slope)});
      }
    }
    MixedMeasure out = identity + MixedMeasure(std::move(atoms), merge_segments(std::move(segs)));
    for (const AtomRow& r : atom_rows) out = out + r.destination;
    return out;
  }

  /// P((-inf, x] x (-inf, y]).
  Rational cdf(const Rational& x, const Rational& y) const {
    Rational total = identity.cdf(x < y ? x : y);
    for (const MapPiece& p : map) {
      if (p.lo >= x) continue;
      const Rational top = p.hi < x ? p.hi : x;
      // origin sub-interval of (lo, top) with T <= y
      Rational lo = p.lo, hi = top;
      if (p.slope == 0) {
        if (p.intercept > y) continue;
      } else {
        const Rational cut = (y - p.intercept) / p.slope;
        if (p.slope < 0) {
          if (cut > lo) lo = cut;
        } else if (cut < hi) {
          hi = cut;
        }
      }
      if (lo < hi) total += p.density * (hi - lo);
    }
    for (const AtomRow& r : atom_rows) {
      if (r.origin <= x) total += r.destination.cdf(y);
    }
    return total;
  }

  /// Exact E[(Y - X)^2].
  Rational squared_gap() const {
    Rational total = 0;
    for (const MapPiece& p : map) {
      // (T(x) - x)^2 = (c0 + c1 x)^2
      const Rational c0 = p.intercept, c1 = p.slope - 1;
      auto prim = [&](const Rational& x) -> Rational {
        return c0 * c0 * x + c0 * c1 * x * x + c1 * c1 * x * x * x / 3;
      };
      total += p.density * (prim(p.hi) - prim(p.lo));
    }
    for (const AtomRow& r : atom_rows) total += second_moment_about(r.destination, r.origin);
    return total;
  }

  bool is_directional() const {
    for (const MapPiece& p : map) {
      if (p.at(p.lo) < p.lo || p.at(p.hi) < p.hi) return false;
    }
    for (const AtomRow& r : atom_rows) {
      if (!r.destination.empty() && r.destination.breakpoints().front() < r.origin) return false;
    }
    return true;
  }

  /// Deterministic transport: every atom goes to a single point and the
  /// identity part is singular to the rest of the first marginal.
  bool is_monge() const {
    for (const AtomRow& r : atom_rows) {
      if (!r.destination.is_discrete() || r.destination.atoms().size() != 1) return false;
    }
    std::vector<const MapPiece*> sorted;
    for (const MapPiece& p : map) sorted.push_back(&p);
    std::sort(sorted.begin(), sorted.end(), [](const MapPiece* a, const MapPiece* b) { return a->lo < b->lo; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i]->lo < sorted[i - 1]->hi) return false;  // one origin, two targets
    }
    std::vector<PointMass> atoms;
    std::vector<Segment> segs;
    for (const MapPiece& p : map) segs.push_back({p.lo, p.hi, p.density});
    for (const AtomRow& r : atom_rows) atoms.push_back({r.origin, r.mass});
    return mutually_singular(identity, MixedMeasure(std::move(atoms), PLMeasure::from_segments(std::move(segs))));
  }

  /// Affine pieces of the full map (identity segments included) when the
  /// coupling is Monge with an atomless first marginal.
  std::optional<std::vector<MapPiece>> monge_pieces() const {
    if (!is_monge() || !atom_rows.empty() || !identity.is_atomless()) return std::nullopt;
    std::vector<MapPiece> out = map;
    for (const Segment& s : identity.continuous().segments()) out.push_back({s.lo, s.hi, s.density, 0, 1});
    std::sort(out.begin(), out.end(), [](const MapPiece& p, const MapPiece& q) { return p.lo < q.lo; });
    return out;
  }

  /// Finite-support view; requires purely atomic parts.
  Coupling to_coupling() const {
    if (!map.empty() || !identity.is_discrete()) throw DomainError("kernel coupling has an atomless part");
    std::vector<SupportPoint> pts;
    auto as_double = [](const Rational& q) {
      const double d = to_double(q);
      if (Rational(d) != q) throw DomainError("location not representable as a double");
      return d;
    };
    for (const PointMass& a : identity.atoms()) pts.push_back({as_double(a.at), as_double(a.at), a.mass});
    for (const AtomRow& r : atom_rows) {
      if (!r.destination.is_discrete()) throw DomainError("kernel coupling has an atomless destination");
      for (const PointMass& d : r.destination.atoms()) pts.push_back({as_double(r.origin), as_double(d.at), d.mass});
    }
    return Coupling(std::move(pts));
  }

 private:
  static PLMeasure merge_segments(const std::vector<Segment>& segs) { return PLMeasure::sum_of_segments(segs); }
};

// ---------------------------------------------------------------------------
// Atom reduction

/// j inserts an interval of length tau({x}) at every atom of tau = mu + nu;
/// the transformed marginals are atomless and j is measure preserving.
struct AtomReduction {
  MonotoneMap j;
  PLMeasure mu_transformed;
  PLMeasure nu_transformed;
};

namespace detail {

inline PLMeasure spread_atoms(const MixedMeasure& m, const MonotoneMap& j) {
  std::vector<Segment> segs;
  const auto cuts = j.knot_locations();
  for (const Segment& s : m.continuous().segments()) {
    std::vector<Rational> pts{s.lo};
    for (const Rational& c : cuts) {
      if (c > s.lo && c < s.hi) pts.push_back(c);
    }
    pts.push_back(s.hi);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      segs.push_back({j(pts[i - 1]), j.left_limit(pts[i]), s.density});
    }
  }
  for (const PointMass& a : m.atoms()) {
    const Rational lo = j.left_limit(a.at), hi = j(a.at);
    segs.push_back({lo, hi, a.mass / (hi - lo)});
  }
  return PLMeasure::from_segments(std::move(segs));
}

}  // namespace detail

inline AtomReduction j_transform(const MixedMeasure& mu, const MixedMeasure& nu) {
  if (!common_part(mu, nu).empty()) throw DomainError("j_transform: marginals share mass; split off the common part first");
  MarginalPair check(mu, nu);  // throws on dominance failure
  std::map<Rational, Rational> jumps;
  for (const PointMass& a : mu.atoms()) jumps[a.at] += a.mass;
  for (const PointMass& a : nu.atoms()) jumps[a.at] += a.mass;
  std::vector<MonotoneMap::MapKnot> knots;
  Rational shift = 0;
  for (const auto& [x, size] : jumps) {
    knots.push_back({x, x + shift, x + shift + size});
    shift += size;
  }
  AtomReduction out{MonotoneMap(std::move(knots), 1, 1), {}, {}};
  out.mu_transformed = detail::spread_atoms(mu, out.j);
  out.nu_transformed = detail::spread_atoms(nu, out.j);
  return out;
}

inline AtomReduction j_transform(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  return j_transform(MixedMeasure(mu), MixedMeasure(nu));
}

namespace detail {

struct JumpInterval {
  Rational x;
  Rational lo;
  Rational hi;
};

inline std::vector<JumpInterval> jump_intervals(const MonotoneMap& j) {
  std::vector<JumpInterval> out;
  for (const auto& k : j.knots()) {
    if (k.left < k.right) out.push_back({k.x, k.left, k.right});
  }
  return out;
}

inline const JumpInterval* jump_containing(const std::vector<JumpInterval>& jumps, const Rational& z) {
  for (const JumpInterval& J : jumps) {
    if (z > J.lo && z < J.hi) return &J;
  }
  return nullptr;
}

/// Pulls map pieces computed on the reduced (atomless) pair back through j.
inline KernelCoupling pull_back(const std::vector<MapPiece>& pieces, const MonotoneMap& j) {
  const auto jumps = jump_intervals(j);
  std::vector<Rational> bounds;
  for (const JumpInterval& J : jumps) {
    bounds.push_back(J.lo);
    bounds.push_back(J.hi);
  }
  KernelCoupling out;
  struct RowParts {
    Rational mass = 0;
    std::vector<PointMass> atoms;
    std::vector<Segment> segs;
  };
  std::map<Rational, RowParts> rows;
  for (const MapPiece& p : pieces) {
    std::vector<Rational> cuts{p.lo, p.hi};
    for (const Rational& b : bounds) {
      if (b > p.lo && b < p.hi) cuts.push_back(b);
      if (p.slope != 0) {
        const Rational z = (b - p.intercept) / p.slope;
        if (z > p.lo && z < p.hi) cuts.push_back(z);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t i = 1; i < cuts.size(); ++i) {
      const Rational& lo = cuts[i - 1];
      const Rational& hi = cuts[i];
      const Rational mid = (lo + hi) / 2;
      const Rational tmid = p.at(mid);
      const JumpInterval* src = jump_containing(jumps, mid);
      const JumpInterval* dst = jump_containing(jumps, tmid);
      const Rational dest_shift = tmid - j.inverse(tmid);
      if (src == nullptr) {
        const Rational src_shift = mid - j.inverse(mid);
        MapPiece q{lo - src_shift, hi - src_shift, p.density, 0, 0};
        if (dst != nullptr) {
          q.intercept = dst->x;
        } else {
          q.intercept = p.intercept + p.slope * src_shift - dest_shift;
          q.slope = p.slope;
        }
        out.map.push_back(std::move(q));
      } else {
        RowParts& row = rows[src->x];
        const Rational mass = p.density * (hi - lo);
        row.mass += mass;
        if (dst != nullptr || p.slope == 0) {
          row.atoms.push_back({dst != nullptr ? dst->x : Rational(tmid - dest_shift), mass});
        } else {
          Rational a = p.at(lo) - dest_shift, b = p.at(hi) - dest_shift;
          if (b < a) std::swap(a, b);
          row.segs.push_back({a, b, mass / (b - a)});
        }
      }
    }
  }
  // merge adjacent map pieces that continue the same affine law
  std::sort(out.map.begin(), out.map.end(), [](const MapPiece& a, const MapPiece& b) { return a.lo < b.lo; });
  std::vector<MapPiece> merged;
  for (MapPiece& q : out.map) {
    if (!merged.empty() && merged.back().hi == q.lo && merged.back().density == q.density &&
        merged.back().intercept == q.intercept && merged.back().slope == q.slope) {
      merged.back().hi = q.hi;
    } else {
      merged.push_back(std::move(q));
    }
  }
  out.map = std::move(merged);
  for (auto& [x, parts] : rows) {
    out.atom_rows.push_back({x, parts.mass,
                             MixedMeasure(std::move(parts.atoms), PLMeasure::from_segments(std::move(parts.segs)))});
  }
  return out;
}

}  // namespace detail

/// Optimal directional coupling for arbitrary discrete / piecewise-linear /
/// mixed marginals: the common part stays put, the singular remainder is
/// reduced to atomless form, transported by T, and pulled back.
inline KernelCoupling couple_general(const MixedMeasure& mu, const MixedMeasure& nu) {
  MarginalPair check(mu, nu);  // equal mass and stochastic order
  MixedMeasure common = common_part(mu, nu);
  const MixedMeasure mu_rest = subtract(mu, common);
  const MixedMeasure nu_rest = subtract(nu, common);
  KernelCoupling out;
  if (!mu_rest.empty()) {
    const AtomReduction red = j_transform(mu_rest, nu_rest);
    const SignedPLFunction f = detail::cdf_difference(red.mu_transformed, red.nu_transformed);
    out = detail::pull_back(map_pieces(f), red.j);
  }
  out.identity = std::move(common);
  return out;
}

using Marginal = std::variant<DiscreteMeasure, PLMeasure>;

inline MixedMeasure to_mixed(const Marginal& m) {
  return std::visit([](const auto& v) { return MixedMeasure(v); }, m);
}

inline KernelCoupling couple_general(const Marginal& mu, const Marginal& nu) {
  return couple_general(to_mixed(mu), to_mixed(nu));
}

/// Atomless case: identity on the common part plus the Monge map T on the rest.
inline KernelCoupling monge_couple(const PLMeasure& mu, const PLMeasure& nu) {
  return couple_general(MixedMeasure(mu), MixedMeasure(nu));
}

}  // namespace dirot
