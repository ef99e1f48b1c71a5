// Runs the twelve acceptance criteria and prints one PASS/FAIL line each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"

using namespace dirot;

namespace {

Rational q(long n, long d = 1) { return make_rational(n, d); }

PLMeasure unif(const Rational& a, const Rational& b, const Rational& mass = 1) { return PLMeasure::uniform(a, b, mass); }

DiscreteMeasure atoms(std::vector<std::pair<double, Rational>> pts) {
  std::vector<Atom> a;
  for (auto& [x, m] : pts) a.push_back({x, m});
  return DiscreteMeasure(std::move(a));
}

struct Outcome {
  bool ok = true;
  std::string detail;

  /// Records the first failing check.
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

int failures = 0;

void run(int id, const char* name, double budget_seconds, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.ok = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (out.ok && secs > budget_seconds) {
    out.ok = false;
    std::ostringstream msg;
    msg << "over the " << budget_seconds << " s budget";
    out.detail = msg.str();
  }
  failures += out.ok ? 0 : 1;
  std::printf("%s  %2d  %-34s %7.3f s%s%s\n", out.ok ? "PASS" : "FAIL", id, name, secs, out.detail.empty() ? "" : "  ",
              out.detail.c_str());
  std::fflush(stdout);
}

std::string at(const Rational& x, const Rational& y) { return "(" + to_string(x) + ", " + to_string(y) + ")"; }

void oracle_equivalence(Outcome& o) {
  std::mt19937_64 rng(20240601);
  for (int i = 0; i < 200 && o.ok; ++i) {
    const auto [mu, nu] = random_dominated_pair(rng);
    const InstanceReport r = check_instance(mu, nu);
    o.require(r.lp_match, "instance " + std::to_string(i) + ": greedy differs from the LP maximizer");
    o.require(r.no_improvable_pair, "instance " + std::to_string(i) + ": improvable pair");
    o.require(r.cdf_match, "instance " + std::to_string(i) + ": closed-form cdf differs from min_cdf");
  }
}

void randomized_uniform(Outcome& o) {
  const KernelCoupling k = couple_general(Marginal(unif(0, 1)), Marginal(unif(0, 2)));
  o.require(k.identity == MixedMeasure(unif(0, 1, q(1, 2))), "identity part is not density 1/2 on [0,1]");
  o.require(k.map == std::vector<MapPiece>{{q(0), q(1), q(1, 2), q(2), q(-1)}}, "map is not 2 - x with density 1/2");
  o.require(k.atom_rows.empty(), "unexpected atom rows");
  const MarginalPair pair(unif(0, 1), unif(0, 2));
  o.require(std::abs(to_double(p_star_cdf(pair, 0.5, 1.2)) - 0.25) < 1e-9, "F*(0.5, 1.2) != 0.25");
  const VarianceBounds b = variance_bounds(Marginal(unif(0, 1)), Marginal(unif(0, 2)));
  o.require(std::abs(to_double(b.lower) - 1.0 / 12) < 1e-9, "lower variance bound != 1/12");
  o.require(std::abs(to_double(b.upper) - 5.0 / 12) < 1e-9, "upper variance bound != 5/12");
}

void monge_panel(Outcome& o) {
  const KernelCoupling k = couple_general(Marginal(unif(0, 2)), Marginal(unif(1, 2)));
  o.require(k.is_monge(), "Monge criterion returned false");
  const auto pieces = k.monge_pieces();
  o.require(pieces.has_value(), "no Monge pieces");
  if (!pieces) return;
  const std::vector<MapPiece> expected{{q(0), q(1), q(1, 2), q(2), q(-1)}, {q(1), q(2), q(1, 2), q(0), q(1)}};
  o.require(*pieces == expected, "pieces differ from T = 2 - x on [0,1], T = x on [1,2]");
}

void discontinuity(Outcome& o) {
  const Rational h = q(1, 2);
  const auto mu = atoms({{0, h}, {1, h}});
  for (int n : {2, 4, 8, 16}) {
    const auto nu = atoms({{1.0 - 1.0 / n, h}, {2, h}});
    o.require(couple(mu, nu) == comonotone(mu, nu), "n = " + std::to_string(n) + ": not comonotone");
  }
  const auto limit = atoms({{1, h}, {2, h}});
  o.require(couple(mu, limit) == antitone(mu, limit), "limit pair: not antitone");
  o.require(antitone(mu, limit) != comonotone(mu, limit), "limit plans coincide");
}

void continuity(Outcome& o) {
  const MarginalPair base(unif(0, 1), unif(0, 2));
  double previous = std::numeric_limits<double>::infinity();
  std::ostringstream trace;
  for (long inv : {10L, 100L, 1000L}) {
    const Rational h = q(1, inv);
    const MarginalPair moved(unif(0, 1), unif(h, 2 + h));
    Rational worst = 0;
    for (long i = 0; i < 50; ++i) {
      for (long j = 0; j < 50; ++j) {
        const Rational x = q(i * 23, 490) - q(1, 10), y = q(j * 23, 490) - q(1, 10);  // [-0.1, 2.2]
        const Rational d = abs(p_star_cdf(moved, x, y) - p_star_cdf(base, x, y));
        if (d > worst) worst = d;
      }
    }
    const double w = to_double(worst);
    trace << " h=1/" << inv << ":" << w;
    o.require(w < previous, "sup not decreasing at h = 1/" + std::to_string(inv));
    previous = w;
  }
  o.require(previous < 0.02, "sup at h = 0.001 is not below 0.02");
  if (o.ok) o.detail = "sup" + trace.str();
}

void bounds_sharpness(Outcome& o) {
  gen::Rng rng(606);
  int unimodal = 0;
  for (int t = 0; t < 100 && o.ok; ++t) {
    const auto [mu, nu] = t % 2 ? gen::pl_pair(rng) : gen::separated_pair(rng);
    const MarginalPair p(mu, nu);
    const bool uni = is_unimodal(p);
    unimodal += uni;
    for (long i = -4; i <= 36; ++i) {
      for (long j = -4; j <= 36; ++j) {
        const Rational x = q(i, 4), y = q(j, 4);
        const Rational f = p_star_cdf(p, x, y), lo = bound_lower(p, x, y), hi = bound_upper(p, x, y);
        o.require(lo <= f && f <= hi, "instance " + std::to_string(t) + ": sandwich fails at " + at(x, y));
        if (uni) o.require(f == lo, "instance " + std::to_string(t) + ": unimodal but F* > lower bound at " + at(x, y));
      }
    }
  }
  const auto [mu, nu] = gen::two_bump();
  const MarginalPair p(mu, nu);
  bool strict = false;
  for (long i = 0; i <= 16 && !strict; ++i) {
    for (long j = 0; j <= 16 && !strict; ++j) strict = p_star_cdf(p, q(i, 4), q(j, 4)) > bound_lower(p, q(i, 4), q(j, 4));
  }
  o.require(strict, "two-bump instance never exceeds the lower bound");
  if (o.ok) o.detail = std::to_string(unimodal) + " unimodal instances";
}

void shadow_laws(Outcome& o) {
  gen::Rng rng(707);
  for (int t = 0; t < 100 && o.ok; ++t) {
    const auto [mu, nu] = gen::pushed_pair(rng);
    // random split mu = mu1 + mu2
    std::vector<Atom> first, second;
    for (const Atom& a : mu.atoms()) {
      const Rational part = a.mass * q(gen::uniform_int(rng, 0, 4), 4);
      if (part > 0) first.push_back({a.location, part});
      if (a.mass - part > 0) second.push_back({a.location, a.mass - part});
    }
    const DiscreteMeasure mu1(std::move(first)), mu2(std::move(second));
    const DiscreteMeasure s1 = shadow(mu1, nu).shadow;
    const DiscreteMeasure s12 = shadow(mu2, subtract(nu, s1)).shadow;
    o.require(shadow(mu, nu).shadow == s1 + s12, "instance " + std::to_string(t) + ": additivity fails");
    const Coupling p = couple(mu, nu);
    for (const Atom& a : mu.atoms()) {
      o.require(image_of_tail(p, a.location) == shadow(restrict(mu, Interval::above(a.location)), nu).shadow,
                "instance " + std::to_string(t) + ": tail image differs from the shadow at " + format_double(a.location));
    }
  }
}

void antitone_peeling(Outcome& o) {
  gen::Rng rng(808);
  std::size_t most_layers = 0;
  for (int t = 0; t <= 50 && o.ok; ++t) {
    PLMeasure mu, nu;
    if (t == 0) {
      std::tie(mu, nu) = gen::two_bump();
    } else {
      std::tie(mu, nu) = gen::pl_pair(rng);
    }
    const std::size_t cap = 1000;
    const AntitoneDecomposition d = decompose(MixedMeasure(mu), MixedMeasure(nu), cap);
    o.require(d.layers.size() < cap, "instance " + std::to_string(t) + ": peeling hit the layer cap");
    if (t == 0) o.require(d.layers.size() == 2, "two-bump instance does not peel into 2 layers");
    most_layers = std::max(most_layers, d.layers.size());
    std::vector<KernelCoupling> layers;
    for (const PeelLayer& l : d.layers) {
      o.require(l.layer.is_unimodal(), "instance " + std::to_string(t) + ": layer not unimodal");
      layers.push_back(detail::pull_back(l.coupling.map, d.j));
    }
    const MarginalPair pair(mu, nu);
    for (long i = 0; i < 20; ++i) {
      for (long j = 0; j < 20; ++j) {
        const Rational x = q(8 * i, 19) - q(1, 2), y = q(8 * j, 19) - q(1, 2);  // [-0.5, 7.5]
        o.require(reconstruct(layers, d.identity, x, y) == p_star_cdf(pair, x, y),
                  "instance " + std::to_string(t) + ": reconstruction differs at " + at(x, y));
      }
    }
  }
  if (o.ok) o.detail = "at most " + std::to_string(most_layers) + " layers";
}

void concave_cost_instance(Outcome& o) {
  const Rational h = q(1, 2);
  const auto mu = atoms({{0, h}, {13, h}});
  const auto nu = atoms({{12, h}, {25, h}});
  const CostFunction g = costs::gap_power(0.5);
  const LpResult best = lp_optimal(TransportPolytopeInstance::unconstrained(mu, nu), g, Sense::minimize);
  const double p_star = expected_cost(couple(mu, nu), g);
  o.require(std::abs(to_double(best.value) - 3.0) < 1e-9, "unconstrained optimum is not 3");
  o.require(best.plan == antitone(mu, nu), "unconstrained optimum is not the antitone plan");
  o.require(std::abs(p_star - std::sqrt(12.0)) < 1e-9, "P* cost is not 2 sqrt(12) / 2");
  o.require(to_double(best.value) < p_star - 1e-9, "unconstrained optimum not strictly below P*");

  const auto mu2 = atoms({{0, h}, {1, h}});
  const auto nu2 = atoms({{2, h}, {3, h}});
  o.require(is_unimodal(MarginalPair(mu2, nu2)), "second instance is not unimodal");
  const LpResult best2 = lp_optimal(TransportPolytopeInstance::unconstrained(mu2, nu2), g, Sense::minimize);
  o.require(std::abs(to_double(best2.value) - expected_cost(couple(mu2, nu2), g)) < 1e-9,
            "unimodal instance: unconstrained minimum differs from the P* cost");
}

void invariance(Outcome& o) {
  std::mt19937_64 rng(1010);
  gen::Rng maps(1011);
  for (int t = 0; t < 50 && o.ok; ++t) {
    const auto [mu, nu] = random_dominated_pair(rng);
    const MonotoneMap phi = gen::increasing_map(maps);
    auto f = [&phi](double x) { return phi.apply(x); };
    o.require(transform_coupling(couple(mu, nu), phi) == couple(push_forward(mu, f), push_forward(nu, f)),
              "instance " + std::to_string(t) + ": transformed plan differs");
  }
}

void j_transform_consistency(Outcome& o) {
  const Rational h = q(1, 2);
  const DiscreteMeasure nu({{1, h}, {2, h}});
  const KernelCoupling k = couple_general(Marginal(unif(0, 2)), Marginal(nu));
  const std::vector<MapPiece> expected{{q(0), q(1), h, q(1), q(0)}, {q(1), q(2), h, q(2), q(0)}};
  o.require(k.map == expected && k.identity.empty() && k.atom_rows.empty(), "map is not T = 1 on (0,1), T = 2 on (1,2)");
  const std::size_t n = 1000;
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = 2.0 * (i + 0.5) / n;
  const Coupling g = couple(DiscreteMeasure::from_samples(xs), nu);
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      const double x = i / 8.0, y = j / 8.0;  // [0, 2.375]
      worst = std::max(worst, std::abs(to_double(coupling_cdf(g, x, y) - k.cdf(exact(x), exact(y)))));
    }
  }
  o.require(worst < 0.01, "discretized cdf differs by " + format_double(worst));
  if (o.ok) o.detail = "sup " + format_double(worst);
}

void cone_constraints(Outcome& o) {
  const Rational h = q(1, 2);
  const auto mu = atoms({{0, h}, {1, h}});
  const auto nu = atoms({{1, h}, {2, h}});
  o.require(couple_cone(mu, nu, ConeConstraint::constant(1)) == comonotone(mu, nu), "D = 1 is not comonotone");
  gen::Rng rng(1212);
  int feasible = 0;
  for (int t = 0; t < 100 && o.ok; ++t) {
    const auto [a, b] = gen::pushed_pair(rng, 4);
    const ConeConstraint c = ConeConstraint::constant(gen::uniform_int(rng, -2, 3));
    const TransportLP lp(
        TransportPolytopeInstance::with_predicate(a, b, [&c](double x, double y) { return c.admits(x, y); }));
    if (!lp.feasible()) {
      bool threw = false;
      try {
        couple_cone(a, b, c);
      } catch (const DominanceError&) {
        threw = true;
      }
      o.require(threw, "instance " + std::to_string(t) + ": LP infeasible but couple_cone succeeded");
      continue;
    }
    ++feasible;
    o.require(couple_cone(a, b, c) == lp.optimal(costs::neg_product(), Sense::maximize).plan,
              "instance " + std::to_string(t) + ": differs from the forbidden-cell LP optimum");
  }
  if (o.ok) o.detail = std::to_string(feasible) + " feasible instances";
}

}  // namespace

int main() {
  run(1, "oracle equivalence", 30, oracle_equivalence);
  run(2, "randomized uniform example", 1, randomized_uniform);
  run(3, "pure Monge coupling", 1, monge_panel);
  run(4, "discontinuity in the marginals", 1, discontinuity);
  run(5, "continuity for atomless marginals", 5, continuity);
  run(6, "bounds sharpness", 10, bounds_sharpness);
  run(7, "shadow laws", 10, shadow_laws);
  run(8, "antitone peeling", 10, antitone_peeling);
  run(9, "concave cost instance", 1, concave_cost_instance);
  run(10, "invariance", 5, invariance);
  run(11, "j-transform consistency", 5, j_transform_consistency);
  run(12, "cone constraints", 10, cone_constraints);
  std::printf("%d/12 criteria passed\n", 12 - failures);
  return failures;
}
