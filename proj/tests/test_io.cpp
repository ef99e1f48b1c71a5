#include <gtest/gtest.h>

#include <sstream>

#include "generators.hpp"

using namespace dirot;

namespace {

Rational q(long n, long d = 1) { return make_rational(n, d); }

Marginal parse(const std::string& text) {
  std::istringstream in(text);
  return read_measure(in);
}

const Rational half = q(1, 2);

}  // namespace

TEST(ReadMeasure, DiscreteAndPiecewiseLinear) {
  const Marginal d = parse("# two atoms\nlocation,mass\n0,1/2\n\n1, 0.5\n");
  ASSERT_TRUE(std::holds_alternative<DiscreteMeasure>(d));
  EXPECT_EQ(std::get<DiscreteMeasure>(d), DiscreteMeasure({{0, half}, {1, half}}));
  const Marginal c = parse("location,cdf\r\n0,0\r\n2,1\r\n");
  ASSERT_TRUE(std::holds_alternative<PLMeasure>(c));
  EXPECT_EQ(std::get<PLMeasure>(c), PLMeasure::uniform(0.0, 2.0));
}

TEST(ReadMeasure, MalformedInput) {
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("where,mass\n0,1\n"), ParseError);
  EXPECT_THROW(parse("location,weight\n0,1\n"), ParseError);
  EXPECT_THROW(parse("location,mass\n0\n"), ParseError);
  EXPECT_THROW(parse("location,mass\n0,abc\n"), ParseError);
  EXPECT_THROW(parse("location,mass\nnan,1\n"), ParseError);
  EXPECT_THROW(parse("location,mass\n0,-1\n"), ParseError);
  EXPECT_THROW(parse("location,cdf\n0,1\n1,2\n"), ParseError);  // cdf must start at 0
  EXPECT_THROW(parse("location,cdf\n0,0\n1,1/0\n"), ParseError);
  try {
    parse("location,mass\n0,1\n1,x\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(read_measure_file("/nonexistent/measure.csv"), ParseError);
}

TEST(ReadSamples, Examples) {
  std::istringstream in("3\n1.5\n# comment\n-2\n");
  EXPECT_EQ(read_samples(in), (std::vector<double>{3, 1.5, -2}));
  std::istringstream empty("# nothing\n");
  EXPECT_THROW(read_samples(empty), ParseError);
  std::istringstream bad("1\ninf\n");
  EXPECT_THROW(read_samples(bad), ParseError);
}

TEST(ReadDisplacement, Examples) {
  std::istringstream in("location,displacement\n0,0\n2,2\n");
  const ConeConstraint c = read_displacement(in);
  EXPECT_EQ(c.displacement(q(1)), q(1));
  std::istringstream bad_header("location,mass\n0,1\n");
  EXPECT_THROW(read_displacement(bad_header), ParseError);
  std::istringstream steep("location,displacement\n0,0\n1,-2\n");
  EXPECT_THROW(read_displacement(steep), ConstraintError);
}

TEST(CouplingJson, ExactFormat) {
  const Coupling p({{0, 2, half}, {1, 1, half}});
  EXPECT_EQ(coupling_json(p), "{\"points\":[{\"x\":0.0,\"y\":2.0,\"mass\":\"1/2\"},{\"x\":1.0,\"y\":1.0,\"mass\":\"1/2\"}]}\n");
  EXPECT_EQ(coupling_csv(p), "x,y,mass\n0,2,1/2\n1,1,1/2\n");
  EXPECT_EQ(coupling_csv(p, '\t'), "x\ty\tmass\n0\t2\t1/2\n1\t1\t1/2\n");
}

TEST(CouplingJson, RoundTrip) {
  gen::Rng rng(71);
  for (int t = 0; t < 100; ++t) {
    const auto [mu, nu] = gen::pushed_pair(rng);
    const Coupling p = couple(mu, nu);
    EXPECT_EQ(coupling_from_json(coupling_json(p)), p);
  }
  // non-integer locations survive the round trip bit for bit
  const Coupling frac({{0.1, 0.30000000000000004, q(1, 3)}, {1e-300, 2.5, q(2, 3)}});
  EXPECT_EQ(coupling_from_json(coupling_json(frac)), frac);
}

TEST(CouplingJson, MalformedInput) {
  EXPECT_THROW(coupling_from_json("{"), ParseError);
  EXPECT_THROW(coupling_from_json("[]"), ParseError);
  EXPECT_THROW(coupling_from_json("{\"points\":[{\"x\":0,\"y\":1}]}"), ParseError);
  EXPECT_THROW(coupling_from_json("{\"points\":[{\"x\":0,\"y\":1,\"mass\":0.5}]}"), ParseError);
  EXPECT_THROW(coupling_from_json("{\"points\":[{\"x\":0,\"y\":1,\"mass\":\"-1\"}]}"), ParseError);
}

TEST(KernelJson, RandomizedUniform) {
  const KernelCoupling k = couple_general(Marginal(PLMeasure::uniform(0.0, 1.0)), Marginal(PLMeasure::uniform(0.0, 2.0)));
  const auto doc = nlohmann::json::parse(kernel_json(k));
  EXPECT_EQ(doc["identity"]["segments"][0]["density"], "1/2");
  EXPECT_EQ(doc["map"][0]["intercept"], "2");
  EXPECT_EQ(doc["map"][0]["slope"], "-1");
  EXPECT_TRUE(doc["atoms"].empty());
}
