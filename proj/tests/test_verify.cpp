#include <gtest/gtest.h>

#include "rauzy/verify.hpp"

using namespace rauzy;

namespace {

VerifyOptions cheap(std::set<std::string> only) {
  VerifyOptions o;
  o.only = std::move(only);
  return o;
}

}  // namespace

TEST(Verify, OnlySelectsChecks) {
  const auto r = verify(cheap({"graph-example", "piece-count"}));
  ASSERT_EQ(r.checks.size(), 2u);
  EXPECT_EQ(r.checks[0].name, "piece-count");
  EXPECT_EQ(r.checks[1].name, "graph-example");
  EXPECT_TRUE(r.passed());
  const auto* g = r.find("graph-example");
  ASSERT_NE(g, nullptr);
  EXPECT_EQ(g->computed["dimension"], 3);
  EXPECT_EQ(g->computed["vertex1_in"], 2.0);
  EXPECT_FALSE(g->claim.empty());
}

TEST(Verify, ReportsAreDeterministic) {
  const std::set<std::string> only{"sturmian-baseline", "cycle-space-roundtrip", "spectral", "graph-example"};
  const auto a = verify(cheap(only)).to_json().dump(2);
  const auto b = verify(cheap(only)).to_json().dump(2);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.find("runtime"), std::string::npos);
  EXPECT_NE(verify(cheap({"spectral"})).to_json(true).dump().find("runtime_s"), std::string::npos);
}

TEST(Verify, EveryCheckHasClaimAndName) {
  VerifyOptions o = cheap({"piece-count", "graph-example", "spectral", "fractal-bounded", "kbonacci-equality"});
  for (const auto& c : verify(o).checks) {
    EXPECT_FALSE(c.claim.empty()) << c.name;
    EXPECT_TRUE(c.pass) << c.name;
  }
}

TEST(Verify, BadOptions) {
  EXPECT_THROW(Verifier(cheap({"nonsense"})), error);
  VerifyOptions o;
  o.seeds.clear();
  EXPECT_THROW(Verifier{o}, error);
}

TEST(Verify, SingleSeedCannotPassHexagonCheck) {
  VerifyOptions o = cheap({"hexagon-quadratic"});
  o.seeds = {1, 1};
  const auto r = verify(o);
  EXPECT_FALSE(r.passed());
}

TEST(Verify, BisectionOracle) {
  const double phi = bisect_root([](long double x) { return x * x - x - 1; }, 1, 2);
  EXPECT_NEAR(phi, 1.6180339887498949, 1e-15);
  EXPECT_THROW(bisect_root([](long double x) { return x * x + 1; }, 0, 1), error);
}

TEST(Verify, KBonacciTranslationVector) {
  const auto a = kbonacci_translation(2);
  ASSERT_EQ(a.size(), 1u);
  // Frequencies of the Fibonacci word are 1/phi and 1/phi^2.
  EXPECT_NEAR(a[0], 1 - 1 / (1.6180339887498949 * 1.6180339887498949), 1e-12);
  EXPECT_EQ(kbonacci_translation(4).size(), 3u);
}
