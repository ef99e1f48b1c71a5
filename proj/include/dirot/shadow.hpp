#pragma once

#include <vector>

#include "dirot/availability_pool.hpp"
#include "dirot/measures.hpp"

namespace dirot {

/// The stochastically smallest theta <= nu with mu0 <=_st theta, together
/// with a directional transport of mu0 onto it.
struct ShadowResult {
  DiscreteMeasure shadow;
  std::vector<Transfer> assignment;  // every row has destination >= origin
};

inline ShadowResult shadow(const DiscreteMeasure& mu0, const DiscreteMeasure& nu) {
  if (mu0.total_mass() > nu.total_mass()) {
    throw DominanceError("shadow: mu0 carries more mass than nu",
                         mu0.empty() ? 0.0 : mu0.atoms().front().location);
  }
  AvailabilityPool pool(nu);
  ShadowResult result;
  result.assignment = detail::greedy_transfers(mu0, pool);
  std::vector<Atom> atoms;
  atoms.reserve(result.assignment.size());
  for (const Transfer& t : result.assignment) atoms.push_back({t.destination, t.mass});
  result.shadow = DiscreteMeasure(std::move(atoms));
  return result;
}

}  // namespace dirot
