#include <gtest/gtest.h>

#include "generators.hpp"

using namespace dirot;

namespace {

Rational q(long n, long d = 1) { return make_rational(n, d); }

DiscreteMeasure atoms(std::vector<std::pair<double, Rational>> pts) {
  std::vector<Atom> a;
  for (auto& [x, m] : pts) a.push_back({x, m});
  return DiscreteMeasure(std::move(a));
}

}  // namespace

TEST(Couple, Examples) {
  const Rational h = q(1, 2), k = q(1, 4);
  EXPECT_EQ(couple(atoms({{0, h}, {1, h}}), atoms({{1, h}, {2, h}})), Coupling({{0, 2, h}, {1, 1, h}}));
  EXPECT_EQ(couple(DiscreteMeasure::dirac(0), DiscreteMeasure::dirac(1)), Coupling({{0, 1, q(1)}}));
  EXPECT_EQ(couple(DiscreteMeasure::from_samples(std::vector<double>{0, 1, 2, 3}),
                   DiscreteMeasure::from_samples(std::vector<double>{1, 1, 2, 4})),
            Coupling({{3, 4, k}, {2, 2, k}, {1, 1, k}, {0, 1, k}}));
}

TEST(Couple, Errors) {
  EXPECT_THROW(couple(DiscreteMeasure::dirac(0), atoms({{1, q(1, 2)}})), DomainError);
  try {
    couple(DiscreteMeasure::dirac(2), DiscreteMeasure::dirac(1));
    FAIL();
  } catch (const DominanceError& e) {
    EXPECT_EQ(e.location(), 2.0);
  }
}

TEST(Couple, IdentityWhenMarginalsAgree) {
  gen::Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    const auto mu = gen::discrete(rng, 6, 0, 10, 7);
    EXPECT_EQ(couple(mu, mu), identity(mu));
  }
}

TEST(Couple, UnequalDenominatorsSplitMass) {
  // 3 samples against 4 samples: masses 1/3 and 1/4 without a common grid
  const auto mu = DiscreteMeasure::from_samples(std::vector<double>{0, 1, 2});
  const auto nu = DiscreteMeasure::from_samples(std::vector<double>{1, 2, 3, 5});
  const Coupling p = couple(mu, nu);
  EXPECT_EQ(p.first_marginal(), mu);
  EXPECT_EQ(p.second_marginal(), nu);
  EXPECT_FALSE(find_improvable_pair(p));
  const auto lp = lp_optimal(TransportPolytopeInstance::directional(mu, nu), costs::neg_product(), Sense::maximize);
  EXPECT_EQ(lp.plan, p);
}

TEST(ImageOfTail, Examples) {
  const Rational h = q(1, 2);
  const Coupling p = couple(atoms({{0, h}, {1, h}}), atoms({{1, h}, {2, h}}));
  EXPECT_EQ(image_of_tail(p, 0.5), atoms({{1, h}}));
  EXPECT_EQ(image_of_tail(p, -kInfinity), p.second_marginal());
  EXPECT_TRUE(image_of_tail(p, kInfinity).empty());
  EXPECT_EQ(image_of_tail(p, 1.0, false), atoms({{1, h}}));
}

TEST(Couple, Properties) {
  gen::Rng rng(17);
  for (int t = 0; t < 300; ++t) {
    const auto [mu, nu] = gen::pushed_pair(rng);
    const Coupling p = couple(mu, nu);
    EXPECT_TRUE(is_directional(p));
    EXPECT_FALSE(find_improvable_pair(p));
    EXPECT_EQ(p.first_marginal(), mu);
    EXPECT_EQ(p.second_marginal(), nu);
    // the tail of the plan is the shadow of the tail
    for (const Atom& a : nu.atoms()) {
      EXPECT_EQ(image_of_tail(p, a.location), shadow(restrict(mu, Interval::above(a.location)), nu).shadow);
    }
    for (const Atom& a : mu.atoms()) {
      EXPECT_EQ(image_of_tail(p, a.location), shadow(restrict(mu, Interval::above(a.location)), nu).shadow);
      EXPECT_EQ(image_of_tail(p, a.location, false),
                shadow(restrict(mu, Interval::at_or_above(a.location)), nu).shadow);
    }
    // closed-form cdf
    const MarginalPair pair(mu, nu);
    for (int x = -1; x <= 19; ++x) {
      for (int y = -1; y <= 19; ++y) EXPECT_EQ(coupling_cdf(p, x, y), p_star_cdf(pair, double(x), double(y)));
    }
  }
}
