#pragma once

#include <vector>

#include "dirot/availability_pool.hpp"
#include "dirot/coupling.hpp"
#include "dirot/measures.hpp"

namespace dirot {

/// Optimal directional coupling of two discrete marginals.
///
/// Atoms of mu are processed from right to left; each one fills the leftmost
/// still-available destination at or above its own location, splitting mass
/// across destinations when needed. The result is directional, has no
/// improvable pair, and is minimal in concordance order among directional
/// couplings. Throws DominanceError if mu is not stochastically below nu.
inline Coupling couple(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.total_mass() != nu.total_mass()) throw DomainError("couple: marginals must have equal mass");
  AvailabilityPool pool(nu);
  const auto transfers = detail::greedy_transfers(mu, pool);
  std::vector<SupportPoint> pts;
  pts.reserve(transfers.size());
  for (const Transfer& t : transfers) pts.push_back({t.origin, t.destination, t.mass});
  return Coupling(std::move(pts));
}

/// Second marginal of P restricted to origins in (x, inf), or [x, inf) when
/// `open_end` is false.
inline DiscreteMeasure image_of_tail(const Coupling& p, double x, bool open_end = true) {
  std::vector<Atom> atoms;
  for (const SupportPoint& s : p.points()) {
    if (open_end ? s.x > x : s.x >= x) atoms.push_back({s.y, s.mass});
  }
  return DiscreteMeasure(std::move(atoms));
}

}  // namespace dirot
