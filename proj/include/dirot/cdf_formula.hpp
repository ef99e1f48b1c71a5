#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "dirot/errors.hpp"
#include "dirot/measures.hpp"
#include "dirot/mixed_measure.hpp"
#include "dirot/rational.hpp"

namespace dirot {

/// Two marginals in stochastic order with their merged breakpoint grid.
/// Evaluates F = F_mu - F_nu, which is cadlag with affine pieces between
/// grid points.
class MarginalPair {
 public:
  MarginalPair(MixedMeasure mu, MixedMeasure nu) : mu_(std::move(mu)), nu_(std::move(nu)) {
    if (mu_.total_mass() != nu_.total_mass()) throw DomainError("marginals must have equal mass");
    grid_ = mu_.breakpoints();
    const auto g2 = nu_.breakpoints();
    grid_.insert(grid_.end(), g2.begin(), g2.end());
    std::sort(grid_.begin(), grid_.end());
    grid_.erase(std::unique(grid_.begin(), grid_.end()), grid_.end());
    for (const Rational& b : grid_) {
      if (gap(b) < 0 || gap_left(b) < 0) {
        throw DominanceError("first marginal is not stochastically below the second", to_double(b));
      }
    }
  }
  MarginalPair(const DiscreteMeasure& mu, const DiscreteMeasure& nu) : MarginalPair(MixedMeasure(mu), MixedMeasure(nu)) {}
  MarginalPair(const PLMeasure& mu, const PLMeasure& nu) : MarginalPair(MixedMeasure(mu), MixedMeasure(nu)) {}

  const MixedMeasure& mu() const { return mu_; }
  const MixedMeasure& nu() const { return nu_; }
  const std::vector<Rational>& grid() const { return grid_; }

  /// F(z) = F_mu(z) - F_nu(z).
  Rational gap(const Rational& z) const { return mu_.cdf(z) - nu_.cdf(z); }
  /// F(z-).
  Rational gap_left(const Rational& z) const { return mu_.cdf_left(z) - nu_.cdf_left(z); }

  /// inf of F over the closed interval [x, y], x <= y.
  Rational gap_infimum(const Rational& x, const Rational& y) const {
    Rational best = gap(x);
    auto consider = [&best](Rational v) {
      if (v < best) best = std::move(v);
    };
    consider(gap(y));
    auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    for (; it != grid_.end() && *it <= y; ++it) {
      consider(gap(*it));
      consider(gap_left(*it));
    }
    return best;
  }

 private:
  MixedMeasure mu_;
  MixedMeasure nu_;
  std::vector<Rational> grid_;
};

/// Joint cdf of the optimal directional coupling:
/// F_nu(y) when y <= x, otherwise F_mu(x) - inf_{z in [x, y]} F(z).
inline Rational p_star_cdf(const MarginalPair& pair, const Rational& x, const Rational& y) {
  if (y <= x) return pair.nu().cdf(y);
  return pair.mu().cdf(x) - pair.gap_infimum(x, y);
}

/// Double overload; accepts infinite arguments.
inline Rational p_star_cdf(const MarginalPair& pair, double x, double y) {
  if (std::isnan(x) || std::isnan(y)) throw DomainError("p_star_cdf: NaN argument");
  if (x == -kInfinity || y == -kInfinity) return 0;
  if (y == kInfinity) return x == kInfinity ? pair.mu().total_mass() : pair.mu().cdf(exact(x));
  if (x == kInfinity) return pair.nu().cdf(exact(y));
  return p_star_cdf(pair, exact(x), exact(y));
}

/// Lower bound F_nu(y) - [(F_mu(y) - F_mu(x)) ^ (F_nu(y) - F_nu(x))]_+.
inline Rational bound_lower(const MarginalPair& pair, const Rational& x, const Rational& y) {
  const Rational dm = pair.mu().cdf(y) - pair.mu().cdf(x);
  const Rational dn = pair.nu().cdf(y) - pair.nu().cdf(x);
  Rational m = dm < dn ? dm : dn;
  if (m < 0) m = 0;
  return pair.nu().cdf(y) - m;
}

/// Upper bound F_mu(x) ^ F_nu(y), the comonotone cdf.
inline Rational bound_upper(const MarginalPair& pair, const Rational& x, const Rational& y) {
  Rational a = pair.mu().cdf(x);
  Rational b = pair.nu().cdf(y);
  return a < b ? a : b;
}

inline Rational bound_lower(const MarginalPair& pair, double x, double y) {
  if (x == -kInfinity || y == -kInfinity) return 0;
  return bound_lower(pair, exact(x), exact(y));
}
inline Rational bound_upper(const MarginalPair& pair, double x, double y) {
  if (x == -kInfinity || y == -kInfinity) return 0;
  return bound_upper(pair, exact(x), exact(y));
}

/// F nondecreasing then nonincreasing, checked on the grid including left
/// limits (with F = 0 at both infinities).
inline bool is_unimodal(const MarginalPair& pair) {
  std::vector<Rational> seq{Rational(0)};
  for (const Rational& b : pair.grid()) {
    seq.push_back(pair.gap_left(b));
    seq.push_back(pair.gap(b));
  }
  seq.emplace_back(0);
  std::size_t i = 1;
  while (i < seq.size() && seq[i] >= seq[i - 1]) ++i;
  while (i < seq.size() && seq[i] <= seq[i - 1]) ++i;
  return i == seq.size();
}

}  // namespace dirot
