#include <gtest/gtest.h>

#include "generators.hpp"

using namespace dirot;

namespace {

Rational q(long n, long d = 1) { return make_rational(n, d); }

PLMeasure unif(long a, long b, Rational mass = 1) { return PLMeasure::uniform(q(a), q(b), mass); }

MixedMeasure to_mixed_atoms(const DiscreteMeasure& d, const PLMeasure& c) {
  std::vector<PointMass> pts;
  for (const Atom& a : d.atoms()) pts.push_back({exact(a.location), a.mass});
  return MixedMeasure(std::move(pts), c);
}

// The kernel cdf agrees with the closed form on a half-integer grid.
void expect_cdf_matches(const KernelCoupling& k, const MarginalPair& pair, long lo, long hi) {
  for (long i = 2 * lo; i <= 2 * hi; ++i) {
    for (long j = 2 * lo; j <= 2 * hi; ++j) {
      ASSERT_EQ(k.cdf(q(i, 2), q(j, 2)), p_star_cdf(pair, q(i, 2), q(j, 2))) << i << "/2, " << j << "/2";
    }
  }
}

}  // namespace

TEST(BuildF, Examples) {
  const SignedPLFunction f = build_F(unif(0, 1), unif(1, 2));
  EXPECT_EQ(f.knots(), (std::vector<LevelKnot>{{q(0), q(0)}, {q(1), q(1)}, {q(2), q(0)}}));
  EXPECT_EQ(f(q(3, 2)), q(1, 2));
  EXPECT_TRUE(f.is_unimodal());
  EXPECT_EQ(f.first_argmax(), q(1));
  EXPECT_THROW(build_F(unif(0, 1), unif(0, 2)), DomainError);  // shared mass
  EXPECT_THROW(build_F(unif(1, 2), unif(0, 1)), DominanceError);
}

TEST(IncreaseDecrease, MergesAdjacentPieces) {
  const SignedPLFunction f({{q(0), q(0)}, {q(1), q(1)}, {q(2), q(3)}, {q(3), q(3)}, {q(4), q(1)}, {q(5), q(2)}, {q(7), q(0)}});
  const auto s = increase_decrease(f);
  EXPECT_EQ(s.increase, (std::vector<OpenInterval>{{q(0), q(2)}, {q(4), q(5)}}));
  EXPECT_EQ(s.decrease, (std::vector<OpenInterval>{{q(3), q(4)}, {q(5), q(7)}}));
}

TEST(TEval, Examples) {
  const SignedPLFunction f = build_F(unif(0, 1), unif(1, 2));
  EXPECT_EQ(t_eval(f, q(1, 2)), q(3, 2));
  EXPECT_EQ(t_eval(f, q(1, 4)), q(7, 4));
  EXPECT_FALSE(t_eval(f, q(0)).has_value());
  EXPECT_FALSE(t_eval(f, q(5)).has_value());
  // two bumps separated by a zero of F
  const auto [mu, nu] = gen::two_bump();
  const SignedPLFunction g = build_F(mu, nu);
  EXPECT_EQ(t_eval(g, q(1, 2)), q(3, 2));
  EXPECT_EQ(t_eval(g, q(5, 2)), q(7, 2));
}

TEST(MongeCouple, SeparatedUniforms) {
  const KernelCoupling k = monge_couple(unif(0, 1), unif(1, 2));
  EXPECT_TRUE(k.identity.empty());
  EXPECT_EQ(k.map, (std::vector<MapPiece>{{q(0), q(1), q(1), q(2), q(-1)}}));
  EXPECT_TRUE(k.is_monge());
  EXPECT_TRUE(k.is_directional());
  EXPECT_EQ(k.squared_gap(), q(4, 3));
}

TEST(CoupleGeneral, RandomizedUniform) {
  const KernelCoupling k = couple_general(Marginal(unif(0, 1)), Marginal(unif(0, 2)));
  EXPECT_EQ(k.identity, MixedMeasure(unif(0, 1, q(1, 2))));
  EXPECT_EQ(k.map, (std::vector<MapPiece>{{q(0), q(1), q(1, 2), q(2), q(-1)}}));
  EXPECT_FALSE(k.is_monge());
  EXPECT_FALSE(k.monge_pieces().has_value());
  EXPECT_EQ(k.cdf(q(1, 2), q(6, 5)), q(1, 4));
}

TEST(CoupleGeneral, PureMongeWithIdentitySegment) {
  const KernelCoupling k = couple_general(Marginal(unif(0, 2)), Marginal(unif(1, 2)));
  EXPECT_TRUE(k.is_monge());
  const auto pieces = k.monge_pieces();
  ASSERT_TRUE(pieces.has_value());
  EXPECT_EQ(*pieces, (std::vector<MapPiece>{{q(0), q(1), q(1, 2), q(2), q(-1)}, {q(1), q(2), q(1, 2), q(0), q(1)}}));
}

TEST(JTransform, SpreadsAtomsIntoIntervals) {
  const AtomReduction r = j_transform(DiscreteMeasure::dirac(0), DiscreteMeasure::dirac(1));
  EXPECT_EQ(r.mu_transformed, unif(0, 1));
  EXPECT_EQ(r.nu_transformed, unif(2, 3));
  EXPECT_EQ(r.j(q(0)), q(1));
  EXPECT_EQ(r.j.left_limit(q(0)), q(0));
  EXPECT_EQ(r.j(q(1, 2)), q(3, 2));
  EXPECT_THROW(j_transform(DiscreteMeasure::dirac(0), DiscreteMeasure::dirac(0)), DomainError);
}

TEST(JTransform, MassPreserving) {
  gen::Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto [mu, nu] = gen::pushed_pair(rng);
    const MixedMeasure m(mu), n(nu);
    const MixedMeasure common = common_part(m, n);
    const MixedMeasure mr = subtract(m, common), nr = subtract(n, common);
    if (mr.empty()) continue;
    const AtomReduction r = j_transform(mr, nr);
    EXPECT_EQ(r.mu_transformed.total_mass(), mr.total_mass());
    for (const PointMass& a : mr.atoms()) {
      EXPECT_EQ(r.mu_transformed.cdf(r.j(a.at)) - r.mu_transformed.cdf(r.j.left_limit(a.at)), a.mass);
      EXPECT_EQ(r.mu_transformed.cdf(r.j(a.at)), mr.cdf(a.at));
    }
  }
}

TEST(CoupleGeneral, ContinuousToAtoms) {
  const DiscreteMeasure two({{1, q(1, 2)}, {2, q(1, 2)}});
  const KernelCoupling k = couple_general(Marginal(unif(0, 2)), Marginal(two));
  EXPECT_TRUE(k.identity.empty());
  EXPECT_EQ(k.map, (std::vector<MapPiece>{{q(0), q(1), q(1, 2), q(1), q(0)}, {q(1), q(2), q(1, 2), q(2), q(0)}}));
  EXPECT_TRUE(k.is_monge());
}

TEST(CoupleGeneral, AtomToContinuous) {
  const KernelCoupling k = couple_general(Marginal(DiscreteMeasure::dirac(0)), Marginal(unif(1, 2)));
  ASSERT_EQ(k.atom_rows.size(), 1u);
  EXPECT_EQ(k.atom_rows[0].origin, q(0));
  EXPECT_EQ(k.atom_rows[0].destination, MixedMeasure(unif(1, 2)));
  EXPECT_FALSE(k.is_monge());
  EXPECT_EQ(k.cdf(q(0), q(3, 2)), q(1, 2));
}

TEST(CoupleGeneral, DiscreteAgreesWithGreedy) {
  gen::Rng rng(6);
  for (int t = 0; t < 150; ++t) {
    const auto [mu, nu] = gen::pushed_pair(rng);
    const KernelCoupling k = couple_general(Marginal(mu), Marginal(nu));
    EXPECT_TRUE(k.map.empty());
    EXPECT_EQ(k.to_coupling(), couple(mu, nu));
  }
}

TEST(CoupleGeneral, PiecewiseLinearProperties) {
  gen::Rng rng(7);
  for (int t = 0; t < 80; ++t) {
    const auto [mu, nu] = t % 2 ? gen::pl_pair(rng) : gen::separated_pair(rng);
    const KernelCoupling k = monge_couple(mu, nu);
    EXPECT_EQ(k.first_marginal(), MixedMeasure(mu));
    EXPECT_EQ(k.second_marginal(), MixedMeasure(nu));
    EXPECT_TRUE(k.is_directional());
    // Monge exactly when the common part is singular to the rest of mu
    const MixedMeasure common = common_part(MixedMeasure(mu), MixedMeasure(nu));
    EXPECT_EQ(k.is_monge(), mutually_singular(common, subtract(MixedMeasure(mu), common)));
    expect_cdf_matches(k, MarginalPair(mu, nu), -1, 9);
  }
}

// T(x) >= x and F(T(x)) = F(x) on every map piece.
TEST(MapPieces, LevelIdentity) {
  gen::Rng rng(8);
  for (int t = 0; t < 200; ++t) {
    const auto [mu, nu] = gen::separated_pair(rng);
    const SignedPLFunction f = build_F(mu, nu);
    Rational covered = 0;
    for (const MapPiece& p : map_pieces(f)) {
      const Rational mid = (p.lo + p.hi) / 2;
      for (const Rational& x : {p.lo, mid, p.hi}) {
        EXPECT_GE(p.at(x), x);
        EXPECT_EQ(f(p.at(x)), f(x));
      }
      EXPECT_EQ(t_eval(f, mid), p.at(mid));
      covered += p.mass();
    }
    EXPECT_EQ(covered, mu.total_mass());
  }
}

TEST(CoupleGeneral, MixedMarginals) {
  gen::Rng rng(9);
  for (int t = 0; t < 25; ++t) {
    const auto [dmu, dnu] = gen::pushed_pair(rng, 3);
    const auto [cmu, cnu] = gen::pl_pair(rng);
    const MixedMeasure mu = to_mixed_atoms(dmu, cmu), nu = to_mixed_atoms(dnu, cnu);
    const KernelCoupling k = couple_general(mu, nu);
    EXPECT_EQ(k.first_marginal(), mu);
    EXPECT_EQ(k.second_marginal(), nu);
    EXPECT_TRUE(k.is_directional());
    expect_cdf_matches(k, MarginalPair(mu, nu), -1, 19);
  }
}

// Greedy on fine empirical measures approaches the atomless coupling.
TEST(CoupleGeneral, DiscretizationConverges) {
  const std::size_t n = 200;
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = (i + 0.5) / n;
    ys[i] = 2 * (i + 0.5) / n;
  }
  const Coupling g = couple(DiscreteMeasure::from_samples(xs), DiscreteMeasure::from_samples(ys));
  const KernelCoupling k = couple_general(Marginal(unif(0, 1)), Marginal(unif(0, 2)));
  double worst = 0;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      const double x = i / 10.0, y = j / 10.0;
      worst = std::max(worst, std::abs(to_double(coupling_cdf(g, x, y) - k.cdf(exact(x), exact(y)))));
    }
  }
  EXPECT_LT(worst, 0.02);
}
