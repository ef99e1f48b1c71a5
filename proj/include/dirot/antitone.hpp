#pragma once

#include <cstddef>
#include <vector>

#include "dirot/errors.hpp"
#include "dirot/measures.hpp"
#include "dirot/mixed_measure.hpp"
#include "dirot/rational.hpp"
#include "dirot/transport_map.hpp"

namespace dirot {

/// Largest unimodal minorant of F sharing its first maximizer:
/// G'(x) = min F over [x, x_G] left of the peak, over [x_G, x] right of it.
inline SignedPLFunction unimodal_envelope(const SignedPLFunction& f) {
  if (f.is_zero()) return f;
  const auto& k = f.knots();
  const Rational peak = f.first_argmax();
  std::size_t p = 0;
  while (k[p].z != peak) ++p;

  std::vector<LevelKnot> left{{k[p].z, k[p].value}};
  Rational level = k[p].value;
  for (std::size_t i = p; i-- > 0;) {
    const LevelKnot& c = k[i];
    const LevelKnot& d = k[i + 1];
    if (c.value < level) {
      // F rises from c to d; it meets the running level at e
      const Rational e = c.z + (level - c.value) * (d.z - c.z) / (d.value - c.value);
      if (e != left.back().z) left.push_back({e, level});
      left.push_back({c.z, c.value});
      level = c.value;
    }
  }
  if (left.back().z != k.front().z) left.push_back({k.front().z, 0});

  std::vector<LevelKnot> right;
  level = k[p].value;
  Rational last = k[p].z;
  for (std::size_t i = p + 1; i < k.size(); ++i) {
    const LevelKnot& c = k[i - 1];
    const LevelKnot& d = k[i];
    if (d.value < level) {
      const Rational e = c.z + (level - c.value) * (d.z - c.z) / (d.value - c.value);
      if (e != last) right.push_back({e, level});
      right.push_back({d.z, d.value});
      last = d.z;
      level = d.value;
    }
  }
  if (right.empty() || right.back().z != k.back().z) right.push_back({k.back().z, 0});

  std::vector<LevelKnot> all(left.rbegin(), left.rend());
  all.insert(all.end(), right.begin(), right.end());
  return SignedPLFunction(std::move(all));
}

struct PeelLayer {
  SignedPLFunction layer;  ///< unimodal F'_k
  Rational peak;           ///< x_G, smallest maximizer
  PLMeasure mu;            ///< positive-variation part of F'_k
  PLMeasure nu;            ///< negative-variation part of F'_k
  KernelCoupling coupling; ///< P*(mu_k, nu_k), in the coordinates of F
};

namespace detail {
inline void jordan_parts(const SignedPLFunction& g, PLMeasure& up, PLMeasure& down) {
  std::vector<Segment> pos, neg;
  const auto& k = g.knots();
  for (std::size_t i = 1; i < k.size(); ++i) {
    const Rational len = k[i].z - k[i - 1].z;
    const Rational rise = k[i].value - k[i - 1].value;
    if (rise > 0) pos.push_back({k[i - 1].z, k[i].z, rise / len});
    if (rise < 0) neg.push_back({k[i - 1].z, k[i].z, -rise / len});
  }
  up = PLMeasure::from_segments(std::move(pos));
  down = PLMeasure::from_segments(std::move(neg));
}
}  // namespace detail

/// Repeatedly removes the unimodal envelope until F vanishes or the layer cap
/// is hit. Each layer is transported by its own antitone map.
inline std::vector<PeelLayer> peel(SignedPLFunction f, std::size_t max_layers = 10000) {
  std::vector<PeelLayer> out;
  while (!f.is_zero()) {
    if (out.size() >= max_layers) break;
    PeelLayer layer;
    layer.layer = unimodal_envelope(f);
    layer.peak = f.first_argmax();
    detail::jordan_parts(layer.layer, layer.mu, layer.nu);
    layer.coupling.map = map_pieces(layer.layer);
    f = f - layer.layer;
    out.push_back(std::move(layer));
  }
  return out;
}

struct AntitoneDecomposition {
  MixedMeasure identity;          ///< common part, transported by y = x
  std::vector<PeelLayer> layers;  ///< layers of F in reduced coordinates
  MonotoneMap j;                  ///< reduction map (identity if no atoms)

  /// Sum of the layer couplings (pulled back) and the identity part.
  KernelCoupling total() const {
    KernelCoupling out;
    out.identity = identity;
    for (const PeelLayer& l : layers) {
      KernelCoupling k = detail::pull_back(l.coupling.map, j);
      out.map.insert(out.map.end(), k.map.begin(), k.map.end());
      out.atom_rows.insert(out.atom_rows.end(), k.atom_rows.begin(), k.atom_rows.end());
    }
    return out;
  }
};

/// Layered decomposition for arbitrary marginals in stochastic order. Atoms
/// are spread by the reduction map j before peeling.
inline AntitoneDecomposition decompose(const MixedMeasure& mu, const MixedMeasure& nu,
                                       std::size_t max_layers = 10000) {
  MarginalPair check(mu, nu);
  AntitoneDecomposition out;
  out.identity = common_part(mu, nu);
  const MixedMeasure mu_rest = subtract(mu, out.identity);
  const MixedMeasure nu_rest = subtract(nu, out.identity);
  if (mu_rest.empty()) return out;
  const AtomReduction red = j_transform(mu_rest, nu_rest);
  out.j = red.j;
  out.layers = peel(detail::cdf_difference(red.mu_transformed, red.nu_transformed), max_layers);
  return out;
}

/// P((-inf,x] x (-inf,y]) of identity + sum of layer couplings.
inline Rational reconstruct(const std::vector<KernelCoupling>& layers, const MixedMeasure& identity,
                            const Rational& x, const Rational& y) {
  Rational total = identity.cdf(x < y ? x : y);
  for (const KernelCoupling& k : layers) total += k.cdf(x, y);
  return total;
}

}  // namespace dirot
