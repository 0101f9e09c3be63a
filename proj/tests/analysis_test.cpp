#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "nlspectral/analysis.hpp"

using namespace nlspectral;

TEST(MaxError, FirstMaximizerAndGrid) {
  const auto zero = [](double) { return 0.0; };
  const auto bump = [](double x) { return 1.0 - x * x; };
  const SampledError e = max_error(bump, zero, 5);
  EXPECT_EQ(e.max_error, 1.0);
  EXPECT_EQ(e.where, 0.0);
  const auto even = [](double x) { return x * x; };
  EXPECT_EQ(max_error(even, zero, 11).where, -1.0);
  EXPECT_THROW(max_error(even, zero, 1), std::invalid_argument);
}

TEST(SolveProblem, Example1Converges) {
  const NonlocalProblem p = example1_problem(0.1);
  const SolvedProblem s = solve_problem(p, 24);
  EXPECT_LT(max_error(s.solution, *p.exact).max_error, 1e-11);
  EXPECT_LT(s.report.residual_inf, 1e-9);
  // nodal values interpolate exactly
  for (std::size_t i = 0; i < s.solution.nodal.size(); ++i)
    EXPECT_EQ(s.solution(s.solution.basis.nodes()[i]), s.solution.nodal[i]);
}

TEST(SolveProblem, OtherCollocationRules) {
  const NonlocalProblem p = example1_problem(0.2);
  for (RuleKind k : {RuleKind::LG, RuleKind::LGR}) {
    SolveSettings s;
    s.colloc_kind = k;
    EXPECT_LT(max_error(solve_problem(p, 24, s).solution, *p.exact).max_error, 1e-8) << to_string(k);
  }
}

TEST(Barrier, IdentityAndConstant) {
  for (double d : {0.1, 0.5}) {
    std::vector<double> xs;
    for (int i = 0; i < 20; ++i) xs.push_back(-0.95 + 1.9 * i / 19.0);
    EXPECT_LE(check_barrier_identity(constant_kernel(d), xs), 1e-11);
    // direct: varpi is quadratic with leading coefficient -1/2, second moment 2
    const auto varpi = barrier_function(d);
    EXPECT_DOUBLE_EQ(varpi(0.0), d * (1 + d));
    EXPECT_DOUBLE_EQ(barrier_bound(d).constant, 0.125 + d * (1 + d));
  }
  const std::vector<double> xs = {0.0};
  EXPECT_THROW(check_barrier_identity(constant_kernel(0.1).scaled(1.5), xs), MomentMismatch);
}

TEST(MaxPrinciple, Outcomes) {
  const Kernel k = constant_kernel(0.1);
  // L(x^2) = 2 > 0: maximum lives on the collar
  const auto up = check_max_principle(k, [](double x) { return x * x; }, 201);
  EXPECT_EQ(up.status, PrincipleStatus::Passed);
  EXPECT_NEAR(up.exterior_max, 1.21, 1e-12);
  // L(-x^2) = -2 < 0: hypothesis fails
  EXPECT_EQ(check_max_principle(k, [](double x) { return -x * x; }, 201).status,
            PrincipleStatus::HypothesisFailed);
  // constant: equality case still passes
  EXPECT_EQ(check_max_principle(k, [](double) { return 3.0; }, 51).status, PrincipleStatus::Passed);
  EXPECT_EQ(to_string(PrincipleStatus::Violated), "violated");
}

TEST(Stability, HomogeneousAndBound) {
  for (int n : {8, 16, 32}) {
    const StabilityReport z = stability_probe(0.1, n, [](double) { return 0.0; });
    EXPECT_LE(z.solution_norm, 1e-11);
  }
  for (double d : {0.05, 0.1, 0.5}) {
    const StabilityReport r = stability_probe(d, 24, [](double x) { return std::cos(3 * x); });
    EXPECT_TRUE(r.within_bound) << "delta=" << d << " norm=" << r.solution_norm << " bound=" << r.bound;
    EXPECT_NEAR(r.source_norm, 1.0, 1e-12);
  }
}

TEST(Stability, ConstantSource) {
  const StabilityReport r = stability_probe(0.1, 32, [](double) { return 1.0; });
  EXPECT_LE(r.solution_norm, 0.125 + 0.11 + 0.5);
  EXPECT_TRUE(r.within_bound);
  // the local problem u'' = -1, u(+-1) = 0 peaks at 1/2; the collar only adds to it
  EXPECT_GT(r.solution_norm, 0.5);
}

TEST(Sweeps, NSweepOrderingAndRecords) {
  const NonlocalProblem p = example1_problem(0.1);
  const std::vector<int> orders = {4, 8, 12, 16};
  SweepSettings settings;
  settings.jobs = 3;
  const auto recs = sweep_n(p, orders, settings);
  ASSERT_EQ(recs.size(), 4u);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(recs[i].order, orders[i]);
    EXPECT_EQ(recs[i].quad_order, orders[i] + 8);
    EXPECT_EQ(recs[i].horizon, 0.1);
    if (i) {
      EXPECT_LT(recs[i].max_error, recs[i - 1].max_error);
    }
  }
  const auto serial = sweep_n(p, orders);
  for (std::size_t i = 0; i < recs.size(); ++i) EXPECT_EQ(serial[i].max_error, recs[i].max_error);

  const std::vector<int> unsorted = {8, 4};
  EXPECT_THROW(sweep_n(p, unsorted), std::invalid_argument);
  settings.quad.fixed = 30;
  EXPECT_EQ(measure(p, 8, settings).quad_order, 30);
  EXPECT_THROW(measure(homogeneous_constraint_problem(0.1, [](double) { return 0.0; }), 8, settings),
               std::invalid_argument);
}

TEST(Sweeps, FitSlope) {
  const std::vector<double> x = {0, 1, 2, 3};
  const std::vector<double> y = {1, 3, 5, 7};
  EXPECT_DOUBLE_EQ(fit_slope(x, y), 2.0);
  const std::vector<double> one = {1.0};
  EXPECT_THROW(fit_slope(one, one), std::invalid_argument);
  const std::vector<double> flat = {2.0, 2.0};
  EXPECT_THROW(fit_slope(flat, std::span(x).subspan(0, 2)), std::invalid_argument);
}

TEST(Sweeps, LocalLimitHalvingRatio) {
  const std::vector<double> deltas = {0.1, 0.05};
  const DeltaSweep s = sweep_delta([](double d) { return local_limit_problem(d); }, deltas, 32);
  const double ratio = s.records[0].max_error / s.records[1].max_error;
  EXPECT_NEAR(ratio, 4.0, 1.2);
  EXPECT_FALSE(s.floor_dominated);
  const std::vector<double> single = {0.1};
  EXPECT_THROW(sweep_delta([](double d) { return local_limit_problem(d); }, single, 32), std::invalid_argument);
}

TEST(Sweeps, ManufacturedSweepIsFloorDominated) {
  const std::vector<double> deltas = {0.1, 0.05};
  const DeltaSweep s = sweep_delta([](double d) { return example1_problem(d); }, deltas, 32);
  EXPECT_TRUE(s.floor_dominated);
}

TEST(ParallelFor, PropagatesExceptions) {
  std::vector<int> hit(10, 0);
  parallel_for(10, 4, [&](std::size_t i) { hit[i] = 1; });
  for (int h : hit) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(5, 2, [](std::size_t i) {
                 if (i == 3) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}

TEST(SolveProblem, CubicIsResolvedExactly) {
  // L x^3 = 6x for a kernel with second moment 2
  const auto cube = [](double x) { return x * x * x; };
  const NonlocalProblem p{"cubic", constant_kernel(0.1), [](double x) { return 6 * x; }, cube, cube};
  for (int n : {3, 4, 10, 20}) {
    EXPECT_LE(max_error(solve_problem(p, n).solution, cube).max_error, 1e-11) << "N=" << n;
  }
}

TEST(MaxError, ZeroAgainstExponential) {
  const SampledError e = max_error([](double) { return 0.0; }, [](double x) { return std::exp(4 * x); });
  EXPECT_DOUBLE_EQ(e.max_error, std::exp(4.0));
  EXPECT_EQ(e.where, 1.0);
}

TEST(Barrier, ConstantIsSupremumOnInterval) {
  for (double d : {0.05, 0.1, 0.5}) {
    const auto varpi = barrier_function(d);
    double sup = -1e300;
    for (int s = 0; s <= 100000; ++s) sup = std::max(sup, varpi(-1.0 + 2.0 * s / 100000));
    EXPECT_NEAR(sup, barrier_bound(d).constant, 1e-9);
  }
}

TEST(Sweeps, ManufacturedSweepAtSmallHorizons) {
  const std::vector<double> deltas = {0.1, 0.05, 0.025, 0.0125};
  const DeltaSweep s = sweep_delta([](double d) { return example1_problem(d); }, deltas, 64);
  EXPECT_TRUE(s.floor_dominated);
  for (const ErrorRecord& r : s.records) EXPECT_LT(r.max_error, 1e-9);
}
