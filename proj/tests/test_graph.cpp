#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <sstream>

#include "rauzy/graph.hpp"
#include "rauzy/substitution.hpp"
#include "rauzy/torus.hpp"
#include "rauzy/verify.hpp"

using namespace rauzy;

namespace {

// Rank of the cycle vectors, as an oracle for linear independence.
Eigen::Index rank_of(const std::vector<CycleVector>& cycles, std::size_t edges) {
  if (cycles.empty()) return 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(edges), static_cast<Eigen::Index>(cycles.size()));
  for (std::size_t j = 0; j < cycles.size(); ++j)
    for (std::size_t i = 0; i < edges; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cycles[j][i];
  return Eigen::FullPivLU<Eigen::MatrixXd>(m).rank();
}

}  // namespace

TEST(WorkedExample, CycleSpace) {
  const auto g = worked_example_graph();
  EXPECT_EQ(g.vertex_count(), 4u);
  EXPECT_EQ(g.edge_count(), 6u);
  const auto basis = cycle_space(g);
  EXPECT_EQ(basis.dimension(), 3u);
  EXPECT_EQ(basis.components, 1u);
  // Breadth-first tree from vertex 1 takes e1, e4, e6; chords e2, e3, e5.
  EXPECT_EQ(basis.chords, (std::vector<std::size_t>{1, 2, 4}));
  EXPECT_EQ(basis.cycles[0], (CycleVector{1, 1, 0, 0, 0, -1}));
  EXPECT_EQ(basis.cycles[1], (CycleVector{0, 0, 1, 1, 0, 1}));
  EXPECT_EQ(basis.cycles[2], (CycleVector{1, 0, 0, 1, 1, 0}));
  for (const auto& z : basis.cycles) {
    std::vector<double> f(z.begin(), z.end());
    for (double d : conservation_defect(g, f)) EXPECT_EQ(d, 0);
  }
}

TEST(WorkedExample, CycleThroughOneThreeTwo) {
  const auto g = worked_example_graph();
  EXPECT_EQ(cycle_vector(g, {"1", "3", "2", "1"}), (CycleVector{-1, -1, 0, 0, 0, 1}));
  EXPECT_THROW(cycle_vector(g, {"1", "3"}), error);
  EXPECT_THROW(cycle_vector(g, {"1", "9", "1"}), error);
}

TEST(WorkedExample, FlowDecomposition) {
  const auto g = worked_example_graph();
  const auto f = g.weights();
  EXPECT_EQ(f, (EdgeFunction{1, 0, 1, 2, 1, 1}));
  for (double d : conservation_defect(g, f)) EXPECT_EQ(d, 0);
  const auto dec = decompose_in_cycles(g, f);
  ASSERT_TRUE(dec.ok);
  ASSERT_EQ(dec.coefficients.size(), 3u);
  EXPECT_NEAR(dec.coefficients[0], 0, 1e-12);
  EXPECT_NEAR(dec.coefficients[1], 1, 1e-12);
  EXPECT_NEAR(dec.coefficients[2], 1, 1e-12);

  auto bad = f;
  bad[0] += 1;
  const auto rejected = decompose_in_cycles(g, bad);
  EXPECT_FALSE(rejected.ok);
  EXPECT_NEAR(rejected.max_defect, 1, 1e-12);
}

TEST(CycleSpace, RandomMultigraphsAgainstIncidenceKernel) {
  auto rng = derive_stream(21, "multigraphs");
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = detail::random_connected_multigraph(rng, 12, 30);
    ASSERT_TRUE(g.connected());
    const auto basis = cycle_space(g);
    const auto ne = g.edge_count(), nv = g.vertex_count();
    ASSERT_EQ(basis.dimension(), ne - nv + 1);
    EXPECT_EQ(rank_of(basis.cycles, ne), static_cast<Eigen::Index>(basis.dimension()));
    for (const auto& z : basis.cycles) {
      std::vector<double> f(z.begin(), z.end());
      for (double d : conservation_defect(g, f)) ASSERT_EQ(d, 0);
    }
    Eigen::MatrixXd incidence = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nv), static_cast<Eigen::Index>(ne));
    for (std::size_t e = 0; e < ne; ++e) {
      incidence(static_cast<Eigen::Index>(g.edges()[e].source), static_cast<Eigen::Index>(e)) += 1;
      incidence(static_cast<Eigen::Index>(g.edges()[e].target), static_cast<Eigen::Index>(e)) -= 1;
    }
    const Eigen::MatrixXd kernel = Eigen::FullPivLU<Eigen::MatrixXd>(incidence).kernel();
    if (basis.dimension() == 0) continue;
    ASSERT_EQ(static_cast<std::size_t>(kernel.cols()), basis.dimension());
    Eigen::VectorXd coeff(kernel.cols());
    for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff(i) = rng.uniform(-2, 2);
    const Eigen::VectorXd flow = kernel * coeff;
    const auto dec = decompose_in_cycles(g, EdgeFunction(flow.data(), flow.data() + flow.size()));
    EXPECT_TRUE(dec.ok) << dec.reason;
    EXPECT_LT(dec.residual, 1e-9);
  }
}

TEST(CycleSpace, DisconnectedAndLoops) {
  const RauzyGraph g({"a", "b", "c"}, {{0, 0, "loop", 0, 0}, {0, 1, "ab", 0, 0}, {1, 0, "ba", 0, 0}});
  EXPECT_EQ(g.component_count(), 2u);
  EXPECT_FALSE(g.connected());
  const auto basis = cycle_space(g);
  EXPECT_EQ(basis.components, 2u);
  EXPECT_EQ(basis.dimension(), 2u);  // |E| - |V| + components
  EXPECT_THROW(RauzyGraph({"a"}, {{0, 3, "x", 0, 0}}), error);
}

TEST(RauzyGraph, FibonacciOrderOne) {
  const auto g = build_rauzy_graph(fixed_point(k_bonacci(2), Symbol{0}), 1, 10000);
  EXPECT_EQ(g.vertex_count(), 2u);
  EXPECT_EQ(g.edge_count(), 3u);
  EXPECT_EQ(cycle_space(g).dimension(), 2u);
  EXPECT_FALSE(g.provisional());
  EXPECT_TRUE(g.edge_index("11"));
  EXPECT_FALSE(g.edge_index("22"));
  double total = 0;
  for (double w : g.weights()) total += w;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(RauzyGraph, MatchesComplexityAndIsConnected) {
  for (std::size_t k : {2, 3, 4}) {
    const auto w = fixed_point(k_bonacci(k), Symbol{0});
    const auto table = complexity(w, 11);
    for (std::size_t n = 1; n <= 10; ++n) {
      const auto g = build_rauzy_graph(w, n, 200000);
      EXPECT_EQ(g.vertex_count(), table.p(n));
      EXPECT_EQ(g.edge_count(), table.p(n + 1));
      EXPECT_TRUE(g.connected());
      for (double d : conservation_defect(g, g.counts())) EXPECT_LE(std::fabs(d), 1.0);
    }
  }
  const auto g = build_rauzy_graph(fixed_point(k_bonacci(3), Symbol{0}), 4, 100000);
  const auto s = graph_stats(g);
  EXPECT_EQ(s.vertices, 9u);
  EXPECT_EQ(s.edges, 11u);
  EXPECT_EQ(s.chi, 3);
}

TEST(RauzyGraph, ProvisionalWhenPrefixTooShort) {
  const auto t = default_hexagon(1);
  const auto g = build_rauzy_graph(coding(t, domain_centroid(t)), 8, 200);
  EXPECT_TRUE(g.provisional());
  EXPECT_THROW(build_rauzy_graph(fixed_point(k_bonacci(2), Symbol{0}), 0, 10), error);
}

TEST(RauzyGraph, DotOutput) {
  std::ostringstream os;
  worked_example_graph().write_dot(os, true);
  const auto s = os.str();
  EXPECT_EQ(s.rfind("digraph", 0), 0u);
  EXPECT_NE(s.find("e6"), std::string::npos);
}

TEST(Euler, KBonacciAndHexagon) {
  for (std::size_t k : {2, 3, 4}) {
    const auto r = euler_characteristic_check(fixed_point(k_bonacci(k), Symbol{0}), k - 1, 8);
    EXPECT_TRUE(r.passed());
    for (const auto& row : r.rows) EXPECT_EQ(row.stats.chi, static_cast<long long>(k));
  }
  const auto t = default_hexagon(1);
  const auto r = euler_characteristic_check(coding(t, domain_centroid(t)), 2, 5, StabilizationPolicy::torus_coding());
  EXPECT_TRUE(r.passed());
  EXPECT_TRUE(r.strict_bound_holds());
  EXPECT_EQ(r.rows.back().stats.chi, 13);  // p(6) - p(5) + 1
}
