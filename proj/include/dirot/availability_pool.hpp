#pragma once

#include <map>
#include <optional>

#include "dirot/measures.hpp"

namespace dirot {

/// Unfilled destination mass, keyed by location. Supports "smallest location
/// >= x with remaining mass" and partial consumption.
class AvailabilityPool {
 public:
  explicit AvailabilityPool(const DiscreteMeasure& nu) {
    for (const Atom& a : nu.atoms()) remaining_.emplace_hint(remaining_.end(), a.location, a.mass);
  }

  /// Smallest location >= x that still has mass.
  std::optional<double> first_at_or_above(double x) const {
    auto it = remaining_.lower_bound(x);
    if (it == remaining_.end()) return std::nullopt;
    return it->first;
  }

  /// Removes up to `wanted` mass from `location`; returns the amount taken.
  Rational take(double location, const Rational& wanted) {
    auto it = remaining_.find(location);
    if (it == remaining_.end()) return 0;
    Rational got = wanted < it->second ? wanted : it->second;
    it->second -= got;
    if (it->second == 0) remaining_.erase(it);
    return got;
  }

  bool empty() const { return remaining_.empty(); }

  DiscreteMeasure remaining() const {
    std::vector<Atom> atoms;
    for (const auto& [loc, mass] : remaining_) atoms.push_back({loc, mass});
    return DiscreteMeasure(std::move(atoms));
  }

 private:
  std::map<double, Rational> remaining_;
};

struct Transfer {
  double origin;
  double destination;
  Rational mass;
  bool operator==(const Transfer&) const = default;
};

namespace detail {

/// Right-to-left greedy: each atom of `mu0` (in decreasing location order)
/// fills the leftmost available destination at or above itself until its
/// mass is exhausted. Throws DominanceError when an atom finds no room.
inline std::vector<Transfer> greedy_transfers(const DiscreteMeasure& mu0, AvailabilityPool& pool) {
  std::vector<Transfer> out;
  const auto& atoms = mu0.atoms();
  for (auto it = atoms.rbegin(); it != atoms.rend(); ++it) {
    Rational left = it->mass;
    while (left > 0) {
      const auto dest = pool.first_at_or_above(it->location);
      if (!dest) {
        throw DominanceError("no destination at or above " + format_double(it->location) +
                                 "; the second marginal does not dominate the first",
                             it->location);
      }
      Rational got = pool.take(*dest, left);
      left -= got;
      out.push_back({it->location, *dest, std::move(got)});
    }
  }
  return out;
}

}  // namespace detail
}  // namespace dirot
