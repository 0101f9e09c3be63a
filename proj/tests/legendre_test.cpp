#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nlspectral/legendre.hpp"
#include "oracles.hpp"

using namespace nlspectral;

TEST(Legendre, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(eval_legendre(2, 0.0).value, -0.5);
  EXPECT_DOUBLE_EQ(eval_legendre(5, 1.0).value, 1.0);
  const double v = eval_legendre(3, 0.4).value;
  EXPECT_NEAR(v, oracle::legendre_explicit(3, 0.4), 1e-14);
  EXPECT_NEAR(v, -0.44, 1e-14);
}

TEST(Legendre, MatchesExplicitFormulas) {
  for (int n = 0; n <= 5; ++n) {
    for (double x = -1.0; x <= 1.0; x += 0.125) {
      EXPECT_NEAR(eval_legendre(n, x).value, oracle::legendre_explicit(n, x), 1e-14) << n << " " << x;
    }
  }
}

TEST(Legendre, EndpointValuesAndBound) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n = 0; n <= 60; ++n) {
    EXPECT_DOUBLE_EQ(eval_legendre(n, 1.0).value, 1.0);
    EXPECT_DOUBLE_EQ(eval_legendre(n, -1.0).value, n % 2 ? -1.0 : 1.0);
    const double end_slope = n * (n + 1.0) / 2.0;
    EXPECT_DOUBLE_EQ(eval_legendre(n, 1.0).derivative, end_slope);
    EXPECT_DOUBLE_EQ(eval_legendre(n, -1.0).derivative, n % 2 ? end_slope : -end_slope);
    for (int s = 0; s < 20; ++s) EXPECT_LE(std::abs(eval_legendre(n, u(rng)).value), 1.0 + 1e-14);
  }
}

TEST(Legendre, DerivativeMatchesFiniteDifference) {
  const double h = 1e-6;
  for (int n : {1, 3, 7, 12, 20}) {
    for (double x : {-0.9, -0.3, 0.1, 0.55, 0.8}) {
      const double fd = (eval_legendre(n, x + h).value - eval_legendre(n, x - h).value) / (2 * h);
      EXPECT_NEAR(eval_legendre(n, x).derivative, fd, 1e-6 * (1 + std::abs(fd)));
      // quotient form away from the endpoints
      const PolyEval a = eval_legendre(n, x), b = eval_legendre(n - 1, x);
      EXPECT_NEAR((1 - x * x) * a.derivative, n * (b.value - x * a.value), 1e-12);
    }
  }
}

TEST(Legendre, RejectsOutOfDomain) {
  EXPECT_THROW(eval_legendre(3, 1.1), std::domain_error);
  EXPECT_THROW(eval_legendre(-1, 0.0), std::invalid_argument);
  EXPECT_NO_THROW(eval_legendre(3, 1.0 + 1e-13));
}

TEST(GaussRule, SmallRulesByHand) {
  const QuadratureRule lgl = gauss_rule(RuleKind::LGL, 2);
  ASSERT_EQ(lgl.size(), 3u);
  const double x[] = {-1, 0, 1}, w[] = {1.0 / 3, 4.0 / 3, 1.0 / 3};
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(lgl.nodes[i], x[i], 1e-14);
    EXPECT_NEAR(lgl.weights[i], w[i], 1e-14);
  }
  const QuadratureRule lg = gauss_rule(RuleKind::LG, 1);
  ASSERT_EQ(lg.size(), 2u);
  EXPECT_NEAR(lg.nodes[0], -1 / std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(lg.nodes[1], 1 / std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(lg.weights[0], 1.0, 1e-14);
  EXPECT_NEAR(lg.weights[1], 1.0, 1e-14);
  // LGR N=1: zeros of L_1 + L_2 = (3x^2 + 2x - 1)/2 -> {-1, 1/3}, weights {1/2, 3/2}
  const QuadratureRule lgr = gauss_rule(RuleKind::LGR, 1);
  EXPECT_NEAR(lgr.nodes[0], -1.0, 0.0);
  EXPECT_NEAR(lgr.nodes[1], 1.0 / 3, 1e-15);
  EXPECT_NEAR(lgr.weights[0], 0.5, 1e-15);
  EXPECT_NEAR(lgr.weights[1], 1.5, 1e-15);
  const QuadratureRule lg0 = gauss_rule(RuleKind::LG, 0);
  EXPECT_EQ(lg0.nodes, std::vector<double>{0.0});
  EXPECT_NEAR(lg0.weights[0], 2.0, 1e-15);
}

class RuleFamily : public ::testing::TestWithParam<RuleKind> {};

TEST_P(RuleFamily, StructureResidualsAndWeights) {
  const RuleKind kind = GetParam();
  for (int n = 1; n <= 256; n = n < 8 ? n + 1 : n * 2) {
    const QuadratureRule r = gauss_rule(kind, n);
    ASSERT_EQ(r.size(), static_cast<std::size_t>(n + 1));
    EXPECT_EQ(r.exact_degree, exact_degree(kind, n));
    double sum = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j > 0) {
        EXPECT_LT(r.nodes[j - 1], r.nodes[j]);
      }
      EXPECT_GE(r.nodes[j], -1.0);
      EXPECT_LE(r.nodes[j], 1.0);
      EXPECT_GT(r.weights[j], 0.0);
      EXPECT_LE(std::abs(node_residual(kind, n, r.nodes[j])), 1e-12) << "N=" << n << " j=" << j;
      sum += r.weights[j];
    }
    EXPECT_NEAR(sum, 2.0, 1e-13) << "N=" << n;
    if (kind != RuleKind::LG) {
      EXPECT_EQ(r.nodes.front(), -1.0);
    }
    if (kind == RuleKind::LGL) {
      EXPECT_EQ(r.nodes.back(), 1.0);
    }
    if (kind != RuleKind::LGR) {
      for (std::size_t j = 0; j < r.size(); ++j) {
        EXPECT_NEAR(r.nodes[j], -r.nodes[r.size() - 1 - j], 1e-14);
        EXPECT_NEAR(r.weights[j], r.weights[r.size() - 1 - j], 1e-14);
      }
    }
  }
}

TEST_P(RuleFamily, ExactOnRandomPolynomialsOfMaximalDegree) {
  const RuleKind kind = GetParam();
  std::mt19937_64 rng(1234);
  for (int n : {2, 4, 8, 16}) {
    const QuadratureRule r = gauss_rule(kind, n);
    for (int trial = 0; trial < 50; ++trial) {
      const oracle::Polynomial p = oracle::random_polynomial(rng, r.exact_degree);
      double q = 0.0;
      for (std::size_t j = 0; j < r.size(); ++j) q += p(r.nodes[j]) * r.weights[j];
      EXPECT_LE(std::abs(q - p.integral(-1, 1)) / p.abs_majorant(), 1e-12);
    }
    // one degree higher is not integrated exactly: x^{d+1} (or x^{d+2} for odd symmetry)
    int d = r.exact_degree + 1;
    if (kind != RuleKind::LGR && d % 2 == 1) ++d;
    double q = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) q += std::pow(r.nodes[j], d) * r.weights[j];
    const double exact = (d % 2 == 0) ? 2.0 / (d + 1) : 0.0;
    EXPECT_GT(std::abs(q - exact), 1e-10) << "degree " << d << " should not be exact";
  }
}

INSTANTIATE_TEST_SUITE_P(AllKinds, RuleFamily,
                         ::testing::Values(RuleKind::LG, RuleKind::LGR, RuleKind::LGL),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(GaussRule, RejectsInvalidOrder) {
  EXPECT_THROW(gauss_rule(RuleKind::LGL, 0), std::invalid_argument);
  EXPECT_THROW(gauss_rule(RuleKind::LG, -1), std::invalid_argument);
}

TEST(GaussRule, DeterministicAndCached) {
  const QuadratureRule a = gauss_rule(RuleKind::LGR, 33);
  const QuadratureRule b = gauss_rule(RuleKind::LGR, 33);
  EXPECT_EQ(a.nodes, b.nodes);
  EXPECT_EQ(a.weights, b.weights);
  const QuadratureRule& c = shared_rule(RuleKind::LGR, 33);
  EXPECT_EQ(&c, &shared_rule(RuleKind::LGR, 33));
  EXPECT_EQ(c.nodes, a.nodes);
}

TEST(GaussRule, ParseKind) {
  EXPECT_EQ(parse_rule_kind("lgl"), RuleKind::LGL);
  EXPECT_EQ(parse_rule_kind("LG"), RuleKind::LG);
  EXPECT_FALSE(parse_rule_kind("gauss").has_value());
}
