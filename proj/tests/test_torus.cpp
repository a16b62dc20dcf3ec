#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "rauzy/random.hpp"
#include "rauzy/relation.hpp"
#include "rauzy/substitution.hpp"
#include "rauzy/torus.hpp"

using namespace rauzy;

TEST(Random, SplitMixReferenceOutput) {
  SplitMix64 g(0);
  EXPECT_EQ(g(), 0xe220a8397b1dcdafULL);
  auto a = derive_stream(1, "x"), b = derive_stream(1, "x"), c = derive_stream(1, "y");
  EXPECT_EQ(a(), b());
  EXPECT_NE(derive_stream(1, "x")(), c());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Cells, HalfOpenIntervals) {
  const auto c = Cell::interval(1, 0.25, 0.75, {0});
  const Vec lo{0.25}, hi{0.75}, mid{0.5};
  EXPECT_TRUE(c.contains(lo));
  EXPECT_FALSE(c.contains(hi));
  EXPECT_TRUE(c.contains(mid));
  EXPECT_DOUBLE_EQ(*c.exact_measure(), 0.5);
  EXPECT_THROW(Cell::interval(1, 0.5, 0.5, {0}), error);
}

TEST(Cells, PolygonOrientationAndBoundaries) {
  // Unit square listed clockwise.
  const auto c = Cell::polygon(1, {{0, 0}, {0, 1}, {1, 1}, {1, 0}}, {0, 0});
  EXPECT_DOUBLE_EQ(*c.exact_measure(), 1.0);
  EXPECT_TRUE(c.contains(Vec{0, 0}));
  EXPECT_TRUE(c.contains(Vec{0, 0.5}));
  EXPECT_FALSE(c.contains(Vec{1, 0.5}));
  EXPECT_FALSE(c.contains(Vec{0.5, 1}));
  EXPECT_THROW(Cell::polygon(1, {{0, 0}, {1, 1}, {2, 2}}, {0, 0}), error);
  EXPECT_THROW(Cell::polygon(1, {{0, 0}, {2, 0}, {1, 0.2}, {2, 2}, {0, 2}}, {0, 0}), error);
}

TEST(Cells, HalfspaceSquare) {
  const auto c = Cell::halfspaces(1, {{{-1, 0}, 0}, {{1, 0}, 1}, {{0, -1}, 0}, {{0, 1}, 1}}, {0, 0}, {1, 1}, {0, 0});
  EXPECT_TRUE(c.contains(Vec{0, 0}));
  EXPECT_FALSE(c.contains(Vec{1, 0.5}));
  EXPECT_FALSE(c.exact_measure());
}

TEST(PiecewiseTranslation, IntegerPartMovesIntoOffsets) {
  const PiecewiseTranslation t({1.25}, {Cell::interval(1, 0, 0.75, {0}), Cell::interval(2, 0.75, 1, {-1})});
  EXPECT_DOUBLE_EQ(t.a()[0], 0.25);
  EXPECT_EQ(t.cells()[0].offset()[0], 1);
  EXPECT_EQ(t.cells()[1].offset()[0], 0);
}

TEST(Circle, CodingIsTheFibonacciWord) {
  // Rotation by 1/phi^2 from x0 = alpha codes the characteristic word of
  // slope alpha, which is the Fibonacci fixed point.
  const double alpha = 1 / (std::numbers::phi * std::numbers::phi);
  const auto t = circle_rotation(alpha);
  const Vec x0{alpha};
  const auto w = coding(t, x0).prefix(20000);
  ASSERT_EQ(w.size(), 20000u);
  EXPECT_EQ(w, fixed_point(k_bonacci(2), Symbol{0}).prefix(20000));
}

TEST(Circle, SturmianComplexity) {
  const auto t = circle_rotation(1 / golden_ratio);
  const auto table = complexity(coding(t, domain_centroid(t)), 30);
  for (const auto& e : table.entries()) {
    EXPECT_EQ(e.p, e.n + 1);
    EXPECT_TRUE(e.stabilized);
  }
}

TEST(Circle, OrbitIsARotation) {
  const double alpha = 1 / golden_ratio;
  const auto t = circle_rotation(alpha);
  const Vec x0{0.1};
  const auto orb = orbit(t, x0, 1000);
  ASSERT_EQ(orb.points.size(), 1001u);
  EXPECT_FALSE(orb.boundary_hit);
  for (std::size_t j = 0; j < orb.points.size(); ++j) {
    const double expected = std::fmod(0.1 + static_cast<double>(j) * alpha, 1.0);
    EXPECT_NEAR(orb.points[j][0], expected, 1e-10);
    EXPECT_EQ(orb.cells[j], orb.points[j][0] < 1 - alpha ? 0u : 1u);
  }
  std::ostringstream os;
  orb.write_csv(os);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "step,x1,cell");
}

TEST(Circle, BoundaryStartIsAmbiguous) {
  const double alpha = 1 / golden_ratio;
  const auto t = circle_rotation(alpha);
  const Vec edge{1 - alpha};
  EXPECT_EQ(t.locate(edge).status, Location::Status::ambiguous);
  const auto orb = orbit(t, edge, 10);
  EXPECT_TRUE(orb.boundary_hit);
  EXPECT_TRUE(orb.points.empty());
  EXPECT_EQ(coding(t, edge).prefix(10).size(), 0u);
  const Vec outside{1.5};
  try {
    orbit(t, outside, 1);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::outside_domain);
  }
  EXPECT_THROW(circle_rotation(0), error);
  EXPECT_THROW(circle_rotation(1), error);
}

TEST(Circle, ExactCylinderMeasures) {
  const double alpha = 1 / golden_ratio;
  const auto t = circle_rotation(alpha);
  const auto w = coding(t, domain_centroid(t));
  const std::size_t len = 1000000;
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto mu = cylinder_measures_1d(t, n);
    EXPECT_EQ(mu.size(), n + 1);
    double total = 0;
    for (const auto& [f, m] : mu) {
      EXPECT_GT(m, 0);
      total += m;
    }
    EXPECT_NEAR(total, 1.0, 1e-14);
    // Independent oracle: empirical frequencies along one orbit.
    const auto counts = factor_counts(w, n, len);
    ASSERT_EQ(counts.size(), mu.size());
    for (const auto& [f, c] : counts) {
      EXPECT_NEAR(static_cast<double>(c) / static_cast<double>(len - n + 1), mu.at(f), 1e-4) << f;
    }
  }
  const auto one = cylinder_measures_1d(t, 1);
  EXPECT_NEAR(one.begin()->second, 1 - alpha, 1e-15);
}

TEST(Hexagon, UnperturbedShape) {
  const auto t = hexagon_translation({2, 3}, {2, 0}, {2, -6});
  EXPECT_EQ(t.k(), 2u);
  EXPECT_EQ(t.m(), 3u);
  EXPECT_NEAR(t.a()[0], 2.0 / 3, 1e-15);
  EXPECT_NEAR(t.a()[1], 5.0 / 6, 1e-15);
  double area = 0;
  for (const auto& c : t.cells()) area += *c.exact_measure();
  EXPECT_NEAR(area, 1.0, 1e-14);
  // Rational translation: not minimal, and the coding is periodic.
  EXPECT_FALSE(minimality_check(t.a(), 100, 1e-9).minimal_evidence());
  StabilizationPolicy p;
  p.min_initial = 4096;
  const auto table = complexity(coding(t, domain_centroid(t)), 10, p);
  EXPECT_LE(table.p(10), 6u);
  EXPECT_THROW(hexagon_translation({2, 3}, {-2, 0}, {2, -6}), error);
}

TEST(Hexagon, TilesTheTorus) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto t = default_hexagon(seed);
    EXPECT_GT(fundamental_domain_coverage(t, 20000, seed), 0.9999);
    EXPECT_GT(image_coverage(t, 20000, seed), 0.9999);
  }
}

TEST(Hexagon, SeededPerturbation) {
  const auto p1 = hexagon_parameters(1), p1b = hexagon_parameters(1), p2 = hexagon_parameters(2);
  EXPECT_EQ(p1.v, p1b.v);
  EXPECT_NE(p1.v, p2.v);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto t = default_hexagon(seed);
    EXPECT_NEAR(t.a()[0], 2.0 / 3, 0.05 + 1e-12);
    EXPECT_NEAR(t.a()[1], 5.0 / 6, 0.05 + 1e-12);
  }
  EXPECT_TRUE(minimality_check(default_hexagon(1).a(), 100, 1e-9).minimal_evidence());
  EXPECT_TRUE(minimality_check(default_hexagon(2).a(), 100, 1e-9).minimal_evidence());
}

TEST(Hexagon, SmallOrderComplexity) {
  const auto t = default_hexagon(1);
  const auto table = complexity(coding(t, domain_centroid(t)), 5, StabilizationPolicy::torus_coding());
  for (const auto& e : table.entries()) EXPECT_EQ(e.p, e.n * e.n + e.n + 1);
}

TEST(Measures, CircleExactAndHexagonSampled) {
  const auto circle = circle_rotation(1 / golden_ratio);
  const auto r = verify_measure_identities(circle, 0);
  EXPECT_TRUE(r.exact);
  EXPECT_LT(std::fabs(r.volume_residual), 1e-15);
  EXPECT_LT(r.flow_residual_norm(), 1e-15);

  const auto hex = default_hexagon(1);
  const auto h = verify_measure_identities(hex, 200000, 9);
  EXPECT_TRUE(h.exact);
  EXPECT_LT(std::fabs(h.volume_residual), 1e-12);
  EXPECT_LT(h.flow_residual_norm(), 1e-12);
  EXPECT_LE(std::fabs(h.sampled_volume_residual), 4 * h.sampled_volume_error);
  for (std::size_t d = 0; d < 2; ++d) EXPECT_LE(std::fabs(h.sampled_flow_residual[d]), 4 * h.sampled_flow_error[d]);
}

TEST(Json, RoundTripKeepsTheCoding) {
  for (const auto& t : {circle_rotation(1 / golden_ratio), default_hexagon(4)}) {
    const auto back = PiecewiseTranslation::from_json(nlohmann::json::parse(t.to_json().dump()));
    EXPECT_EQ(back.k(), t.k());
    EXPECT_EQ(back.m(), t.m());
    EXPECT_EQ(back.name(), t.name());
    const auto x0 = domain_centroid(t);
    EXPECT_EQ(coding(back, x0).prefix(5000), coding(t, x0).prefix(5000));
  }
  const PiecewiseTranslation square(
      {0.3, 0.7},
      {Cell::halfspaces(1, {{{-1, 0}, 0}, {{1, 0}, 1}, {{0, -1}, 0}, {{0, 1}, 1}}, {0, 0}, {1, 1}, {0, 0})});
  const auto back = PiecewiseTranslation::from_json(square.to_json());
  EXPECT_EQ(back.cells()[0].kind(), Cell::Kind::halfspaces);
  EXPECT_TRUE(back.cells()[0].contains(Vec{0.5, 0.5}));
}

TEST(Json, Errors) {
  auto j = circle_rotation(0.3).to_json();
  j["cells"][0]["kind"] = "blob";
  try {
    PiecewiseTranslation::from_json(j);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::parse_error);
  }
  j = circle_rotation(0.3).to_json();
  j["lattice"] = {{2}};
  EXPECT_THROW(PiecewiseTranslation::from_json(j), error);
  j = circle_rotation(0.3).to_json();
  j.erase("a");
  EXPECT_THROW(PiecewiseTranslation::from_json(j), error);
}

TEST(Centroid, Circle) {
  const auto c = domain_centroid(circle_rotation(0.3));
  EXPECT_NEAR(c[0], 0.5, 1e-15);
}
