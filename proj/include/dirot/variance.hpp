#pragma once

#include "dirot/coupling.hpp"
#include "dirot/greedy.hpp"
#include "dirot/measures.hpp"
#include "dirot/mixed_measure.hpp"
#include "dirot/rational.hpp"
#include "dirot/transport_map.hpp"

namespace dirot {

/// Sharp bounds on Var(Y - X) over couplings with Y >= X. E[Y - X] does not
/// depend on the coupling; E[(Y - X)^2] is smallest under the comonotone
/// plan and largest under P*.
struct VarianceBounds {
  Rational lower;
  Rational upper;
  Rational mean_gap;
};

inline VarianceBounds variance_bounds(const MixedMeasure& mu, const MixedMeasure& nu) {
  const KernelCoupling p = couple_general(mu, nu);
  VarianceBounds b;
  b.mean_gap = mean(nu) - mean(mu);
  const Rational shift = b.mean_gap * b.mean_gap;
  b.lower = comonotone_squared_gap(mu, nu) - shift;
  b.upper = p.squared_gap() - shift;
  return b;
}

inline VarianceBounds variance_bounds(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const Coupling p = couple(mu, nu);
  VarianceBounds b;
  b.mean_gap = mean(nu) - mean(mu);
  const Rational shift = b.mean_gap * b.mean_gap;
  b.lower = comonotone_squared_gap(MixedMeasure(mu), MixedMeasure(nu)) - shift;
  b.upper = expected_squared_gap(p) - shift;
  return b;
}

inline VarianceBounds variance_bounds(const Marginal& mu, const Marginal& nu) {
  if (const auto* a = std::get_if<DiscreteMeasure>(&mu)) {
    if (const auto* b = std::get_if<DiscreteMeasure>(&nu)) return variance_bounds(*a, *b);
  }
  return variance_bounds(to_mixed(mu), to_mixed(nu));
}

}  // namespace dirot
