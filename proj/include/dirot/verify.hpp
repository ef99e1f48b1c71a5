#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dirot/cdf_formula.hpp"
#include "dirot/coupling.hpp"
#include "dirot/greedy.hpp"
#include "dirot/measures.hpp"
#include "dirot/oracle.hpp"
#include "dirot/rational.hpp"

namespace dirot {

/// Equal-mass discrete pair with 1..max_atoms atoms of mass 1/n at integer
/// locations in [0, 20]; dominance comes from sorting two draws and taking
/// elementwise min / max.
inline std::pair<DiscreteMeasure, DiscreteMeasure> random_dominated_pair(std::mt19937_64& rng,
                                                                         int max_atoms = 6) {
  std::uniform_int_distribution<int> size(1, max_atoms);
  std::uniform_int_distribution<int> loc(0, 20);
  const int n = size(rng);
  std::vector<int> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a[i] = loc(rng);
    b[i] = loc(rng);
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const Rational w = make_rational(1, n);
  std::vector<Atom> lo, hi;
  for (int i = 0; i < n; ++i) {
    lo.push_back({static_cast<double>(std::min(a[i], b[i])), w});
    hi.push_back({static_cast<double>(std::max(a[i], b[i])), w});
  }
  return {DiscreteMeasure(std::move(lo)), DiscreteMeasure(std::move(hi))};
}

struct InstanceReport {
  bool lp_match = false;
  bool no_improvable_pair = false;
  bool cdf_match = false;
  bool passed() const { return lp_match && no_improvable_pair && cdf_match; }
};

/// Greedy against the exact LP: same maximizer for g = -xy, no improvable
/// pair, and closed-form cdf equal to the least quadrant mass at every
/// corner of the integer grid [0, 20]^2.
inline InstanceReport check_instance(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  InstanceReport r;
  const Coupling greedy = couple(mu, nu);
  const TransportLP lp(TransportPolytopeInstance::directional(mu, nu));
  r.lp_match = lp.optimal(costs::neg_product(), Sense::maximize).plan == greedy;
  r.no_improvable_pair = !find_improvable_pair(greedy).has_value();
  const MarginalPair pair(mu, nu);
  // min_cdf only depends on which atoms fall in the quadrant
  std::map<std::pair<std::size_t, std::size_t>, Rational> memo;
  auto count_le = [](const DiscreteMeasure& m, double v) {
    std::size_t k = 0;
    for (const Atom& a : m.atoms()) k += a.location <= v ? 1 : 0;
    return k;
  };
  r.cdf_match = true;
  for (int x = 0; x <= 20 && r.cdf_match; ++x) {
    for (int y = 0; y <= 20 && r.cdf_match; ++y) {
      const auto key = std::make_pair(count_le(mu, x), count_le(nu, y));
      auto it = memo.find(key);
      if (it == memo.end()) it = memo.emplace(key, lp.min_cdf(x, y)).first;
      r.cdf_match = p_star_cdf(pair, static_cast<double>(x), static_cast<double>(y)) == it->second;
    }
  }
  return r;
}

/// Runs `count` seeded random instances and prints "k/count instances passed".
/// Returns the number of failures.
inline std::size_t run_verification(std::uint64_t seed, std::size_t count, std::ostream& out) {
  std::mt19937_64 rng(seed);
  std::size_t passed = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const auto [mu, nu] = random_dominated_pair(rng);
    const InstanceReport r = check_instance(mu, nu);
    if (r.passed()) {
      ++passed;
    } else {
      out << "instance " << i << " failed:" << (r.lp_match ? "" : " lp") << (r.no_improvable_pair ? "" : " crossing")
          << (r.cdf_match ? "" : " cdf") << "\n";
    }
  }
  out << passed << "/" << count << " instances passed\n";
  return count - passed;
}

}  // namespace dirot
