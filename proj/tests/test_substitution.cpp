#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <sstream>

#include "rauzy/random.hpp"
#include "rauzy/substitution.hpp"

using namespace rauzy;

namespace {

// sigma^n(seed) by repeated application.
FiniteWord iterate(const Substitution& s, Symbol seed, std::size_t min_len) {
  FiniteWord w(s.alphabet(), {seed});
  while (w.size() < min_len) w = apply(s, w);
  return w;
}

Substitution random_substitution(SplitMix64& rng, std::size_t k) {
  std::vector<std::vector<Symbol>> images(k);
  for (auto& img : images) {
    const std::size_t len = 1 + rng() % 4;
    for (std::size_t i = 0; i < len; ++i) img.push_back(Symbol{static_cast<std::uint8_t>(rng() % k)});
  }
  return Substitution(make_alphabet(k), std::move(images));
}

}  // namespace

TEST(Substitution, KBonacciImages) {
  const auto s = k_bonacci(4);
  EXPECT_EQ(FiniteWord(s.alphabet(), s.image(Symbol{0})).to_string(), "12");
  EXPECT_EQ(FiniteWord(s.alphabet(), s.image(Symbol{2})).to_string(), "14");
  EXPECT_EQ(FiniteWord(s.alphabet(), s.image(Symbol{3})).to_string(), "1");
  EXPECT_THROW(k_bonacci(0), error);
  EXPECT_EQ(Substitution::parse(make_alphabet(2), {"12", "1"}), k_bonacci(2));
}

TEST(Substitution, RejectsBadImages) {
  EXPECT_THROW(Substitution(make_alphabet(2), {{Symbol{0}}, {}}), error);
  EXPECT_THROW(Substitution(make_alphabet(2), {{Symbol{0}}}), error);
  EXPECT_THROW(Substitution(make_alphabet(2), {{Symbol{0}}, {Symbol{5}}}), error);
  EXPECT_THROW(Substitution::parse(make_alphabet(2), {"12", "3"}), error);
}

TEST(FixedPoint, KnownPrefixes) {
  EXPECT_EQ(fixed_point(k_bonacci(2), Symbol{0}).prefix(8).to_string(), "12112121");
  EXPECT_EQ(fixed_point(k_bonacci(3), Symbol{0}).prefix(7).to_string(), "1213121");
  EXPECT_EQ(fixed_point(k_bonacci(4), Symbol{0}).prefix(8).to_string(), "12131214");
  EXPECT_EQ(fixed_point(k_bonacci(2), Symbol{0}).prefix(0).size(), 0u);
  EXPECT_EQ(fixed_point(k_bonacci(1), Symbol{0}).prefix(4).to_string(), "1111");
}

TEST(FixedPoint, MatchesIteratedImages) {
  for (std::size_t k = 2; k <= 6; ++k) {
    const auto s = k_bonacci(k);
    const auto direct = iterate(s, Symbol{0}, 5000);
    const auto lazy = fixed_point(s, Symbol{0}).prefix(direct.size());
    EXPECT_EQ(lazy, direct) << "k=" << k;
  }
}

TEST(FixedPoint, StableUnderSubstitution) {
  for (std::size_t k = 2; k <= 5; ++k) {
    const auto s = k_bonacci(k);
    const auto w = fixed_point(s, Symbol{0}).prefix(2000);
    const auto image = apply(s, w);
    ASSERT_GE(image.size(), w.size());
    EXPECT_EQ(image.slice(0, w.size()), w);
  }
}

TEST(FixedPoint, RequiresProlongableSeed) {
  const auto s = Substitution::parse(make_alphabet(2), {"21", "1"});
  EXPECT_THROW(fixed_point(s, Symbol{0}), error);
}

TEST(Abelianization, KBonacciMatrix) {
  const auto m = abelianization(k_bonacci(3));
  IntMatrix expected(3, 3);
  expected << 1, 1, 1, 1, 0, 0, 0, 1, 0;
  EXPECT_EQ(m, expected);
  for (Eigen::Index j = 0; j < 3; ++j) EXPECT_EQ(m.col(j).sum(), static_cast<std::int64_t>(k_bonacci(3).images()[j].size()));
}

TEST(Abelianization, Functorial) {
  auto rng = derive_stream(11, "functorial");
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + rng() % 5;
    const auto a = random_substitution(rng, k), b = random_substitution(rng, k);
    EXPECT_EQ(abelianization(compose(a, b)), abelianization(a) * abelianization(b));
  }
}

TEST(Abelianization, Primitivity) {
  for (std::size_t k = 1; k <= 8; ++k) EXPECT_TRUE(is_primitive(abelianization(k_bonacci(k))));
  EXPECT_FALSE(is_primitive(abelianization(Substitution::parse(make_alphabet(2), {"12", "2"}))));
  EXPECT_FALSE(is_primitive(abelianization(Substitution::parse(make_alphabet(2), {"2", "1"}))));
}

TEST(Perron, FibonacciValues) {
  const auto p = perron(abelianization(k_bonacci(2)));
  EXPECT_NEAR(p.eigenvalue, std::numbers::phi, 1e-12);
  EXPECT_NEAR(p.right(0), 1 / std::numbers::phi, 1e-12);
  EXPECT_NEAR(p.right(1), 1 / (std::numbers::phi * std::numbers::phi), 1e-12);
  EXPECT_LT(p.residual, 1e-12);
}

TEST(Perron, AgreesWithDenseEigensolver) {
  for (std::size_t k = 2; k <= 7; ++k) {
    const auto m = abelianization(k_bonacci(k));
    const auto p = perron(m);
    const Eigen::EigenSolver<Eigen::MatrixXd> es(m.cast<double>());
    double best = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) best = std::max(best, es.eigenvalues()(i).real());
    EXPECT_NEAR(p.eigenvalue, best, 1e-10) << "k=" << k;
    EXPECT_NEAR(p.right.sum(), 1.0, 1e-14);
    EXPECT_NEAR(p.left.sum(), 1.0, 1e-14);
    EXPECT_GT(p.right.minCoeff(), 0);
    EXPECT_GT(p.left.minCoeff(), 0);
  }
}

TEST(Perron, Errors) {
  try {
    perron(abelianization(Substitution::parse(make_alphabet(2), {"12", "2"})));
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::non_primitive);
  }
  try {
    perron(abelianization(k_bonacci(1)));
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::non_expanding);
  }
  try {
    perron(abelianization(k_bonacci(5)), 1e-12, 1);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::non_convergence);
  }
}

TEST(BrokenLine, StepsAreUnitVectors) {
  const auto w = fixed_point(k_bonacci(3), Symbol{0});
  const auto line = broken_line(w, 500);
  ASSERT_EQ(line.vertex_count(), 501u);
  for (auto c : line.vertex(0)) EXPECT_EQ(c, 0);
  for (std::size_t j = 0; j < 500; ++j) {
    for (std::size_t i = 0; i < 3; ++i) {
      const auto d = line.vertex(j + 1)[i] - line.vertex(j)[i];
      EXPECT_EQ(d, i == line.steps()[j].id ? 1 : 0);
    }
  }
}

TEST(Projection, KillsPerronDirection) {
  for (std::size_t k = 2; k <= 5; ++k) {
    const auto p = perron(abelianization(k_bonacci(k)));
    const ContractingProjection proj(p);
    EXPECT_EQ(proj.dimension(), k - 1);
    EXPECT_LT(proj.apply(p.right).norm(), 1e-14);
    EXPECT_LT(proj.coordinates(p.right).norm(), 1e-14);
    for (std::size_t i = 0; i < proj.dimension(); ++i) {
      EXPECT_NEAR(proj.basis()[i].dot(p.right), 0, 1e-14);
      EXPECT_NEAR(proj.basis()[i].norm(), 1, 1e-14);
    }
  }
}

TEST(FractalCloud, ShapeAndLabels) {
  const auto c2 = fractal_cloud(k_bonacci(2), 10000);
  EXPECT_EQ(c2.dimension(), 1u);
  EXPECT_EQ(c2.size(), 10000u);
  std::set<int> labels;
  for (auto s : c2.labels) labels.insert(s.id);
  EXPECT_EQ(labels.size(), 2u);

  const auto c3 = fractal_cloud(k_bonacci(3), 20000);
  EXPECT_EQ(c3.dimension(), 2u);
  labels.clear();
  for (auto s : c3.labels) labels.insert(s.id);
  EXPECT_EQ(labels.size(), 3u);
  EXPECT_LT(c3.radius, 5.0);

  const auto one = fractal_cloud(k_bonacci(3), 1);
  ASSERT_EQ(one.size(), 1u);
  for (double x : one.point(0)) EXPECT_EQ(x, 0.0);
  EXPECT_THROW(fractal_cloud(k_bonacci(3), 0), error);
}

TEST(FractalCloud, BinaryRoundTrip) {
  const auto c = fractal_cloud(k_bonacci(3), 100);
  std::stringstream ss;
  c.write_binary(ss);
  EXPECT_EQ(ss.str().substr(0, 4), "RZYC");
  const auto [k, data] = read_binary_cloud(ss);
  EXPECT_EQ(k, 3u);
  ASSERT_EQ(data.size(), 100u * 3);
  for (std::size_t j = 0; j < 100; ++j) {
    EXPECT_EQ(data[3 * j], c.point(j)[0]);
    EXPECT_EQ(data[3 * j + 1], c.point(j)[1]);
    EXPECT_EQ(data[3 * j + 2], static_cast<double>(c.labels[j].id + 1));
  }
}

TEST(FractalCloud, CsvHeader) {
  std::ostringstream os;
  fractal_cloud(k_bonacci(3), 3).write_csv(os);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "x1,x2,label");
}
