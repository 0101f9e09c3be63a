#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nlspectral/assembler.hpp"
#include "nlspectral/linsolve.hpp"
#include "oracles.hpp"

using namespace nlspectral;

namespace {

// Problem whose constraint data is p itself, so A p + load reproduces L p.
NonlocalProblem polynomial_problem(double delta, const oracle::Polynomial& p) {
  return NonlocalProblem{"poly", constant_kernel(delta), [](double) { return 0.0; }, p, p};
}

std::vector<double> nodal_values(const CardinalBasis& b, const ScalarFunction& u) {
  std::vector<double> v;
  for (double x : b.nodes()) v.push_back(u(x));
  return v;
}

}  // namespace

TEST(ClassifyRow, Cases) {
  const RowClassification r = classify_row(0.95, 0.1);
  EXPECT_EQ(r.row_case, RowCase::III);
  EXPECT_NEAR(r.interior.lo, 0.85, 1e-15);
  EXPECT_EQ(r.interior.hi, 1.0);
  ASSERT_EQ(r.exterior.size(), 1u);
  EXPECT_EQ(r.exterior[0].lo, 1.0);
  EXPECT_NEAR(r.exterior[0].hi, 1.05, 1e-15);

  EXPECT_EQ(classify_row(0.0, 0.1).row_case, RowCase::I);
  EXPECT_TRUE(classify_row(0.0, 0.1).exterior.empty());
  EXPECT_EQ(classify_row(-1.0, 0.1).row_case, RowCase::II);
  EXPECT_EQ(classify_row(0.0, 1.5).row_case, RowCase::IV);
  EXPECT_EQ(classify_row(0.0, 1.5).exterior.size(), 2u);
  // a ball that only touches the boundary has no overhang
  EXPECT_EQ(classify_row(0.5, 0.5).row_case, RowCase::I);
  EXPECT_EQ(to_string(RowCase::III), "III");
}

TEST(Assemble, RowsMatchOperatorOnPolynomials) {
  std::mt19937_64 rng(3);
  for (double d : {0.05, 0.1, 0.5}) {
    for (int n : {4, 9, 16}) {
      const CardinalBasis basis = CardinalBasis::lgl(n);
      for (int trial = 0; trial < 3; ++trial) {
        const oracle::Polynomial p = oracle::random_polynomial(rng, n);
        const NonlocalProblem prob = polynomial_problem(d, p);
        const CollocationSystem sys = assemble(basis, prob);
        const std::vector<double> ap = apply_discrete(sys, nodal_values(basis, p));
        bool saw_boundary = false;
        for (std::size_t i = 0; i < sys.size(); ++i) {
          const double x = basis.nodes()[i];
          const double load = prob.source(x) - sys.rhs[i];
          const double ref = oracle::constant_kernel_operator(p, x, d);
          EXPECT_NEAR(ap[i] + load, ref, 1e-10 * std::max(1.0, std::abs(ref)))
              << "delta=" << d << " N=" << n << " row " << i;
          saw_boundary = saw_boundary || sys.rows[i].row_case != RowCase::I;
        }
        EXPECT_TRUE(saw_boundary);
      }
    }
  }
}

TEST(Assemble, AnnihilatesConstantsOnInteriorRows) {
  const CardinalBasis basis = CardinalBasis::lgl(20);
  const CollocationSystem sys = assemble(basis, example1_problem(0.1));
  const std::vector<double> ones(basis.size(), 1.0);
  const std::vector<double> a1 = apply_discrete(sys, ones);
  for (std::size_t i = 0; i < sys.size(); ++i) {
    if (sys.rows[i].row_case == RowCase::I) {
      EXPECT_NEAR(a1[i], 0.0, 1e-9) << "row " << i;
    } else {
      // missing overhang mass: -int_{overhang} gamma
      double overhang = 0.0;
      for (const Interval& piece : sys.rows[i].exterior) overhang += piece.length();
      EXPECT_NEAR(a1[i], -3.0 / 1e-3 * overhang, 1e-9);
    }
  }
}

TEST(Assemble, ReflectionSymmetry) {
  // LGL nodes are symmetric, so A[N-i][N-k] = A[i][k]
  const CardinalBasis basis = CardinalBasis::lgl(14);
  const CollocationSystem sys = assemble(basis, example1_problem(0.3));
  const std::size_t n = sys.size();
  const double scale = sys.matrix.max_abs();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      EXPECT_NEAR(sys.matrix(n - 1 - i, n - 1 - k), sys.matrix(i, k), 1e-12 * scale);
}

TEST(Assemble, LinearInData) {
  const CardinalBasis basis = CardinalBasis::lgl(10);
  const auto f1 = [](double x) { return std::sin(x); };
  const auto g1 = [](double x) { return x * x; };
  const auto f2 = [](double x) { return std::exp(x); };
  const auto g2 = [](double x) { return std::cos(3 * x); };
  const Kernel k = constant_kernel(0.2);
  const auto a = assemble(basis, {"a", k, f1, g1, std::nullopt});
  const auto b = assemble(basis, {"b", k, f2, g2, std::nullopt});
  const auto c = assemble(basis, {"c", k, [&](double x) { return 2 * f1(x) - 3 * f2(x); },
                                  [&](double x) { return 2 * g1(x) - 3 * g2(x); }, std::nullopt});
  EXPECT_EQ(a.matrix, b.matrix);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(c.rhs[i], 2 * a.rhs[i] - 3 * b.rhs[i], 1e-10);
}

TEST(Assemble, ResidualOfExactSolutionDecays) {
  const NonlocalProblem prob = example1_problem(0.1);
  double previous = 1e300;
  for (int n : {8, 16, 24}) {
    const CardinalBasis basis = CardinalBasis::lgl(n);
    const CollocationSystem sys = assemble(basis, prob);
    const std::vector<double> au = apply_discrete(sys, nodal_values(basis, *prob.exact));
    double r = 0.0;
    for (std::size_t i = 0; i < sys.size(); ++i) r = std::max(r, std::abs(au[i] - sys.rhs[i]));
    EXPECT_LT(r, previous);
    previous = r;
  }
  EXPECT_LT(previous, 1e-8);
}

TEST(Assemble, ThreadedMatchesSerial) {
  const CardinalBasis basis = CardinalBasis::lgl(33);
  AssemblyOptions threaded;
  threaded.jobs = 4;
  const auto a = assemble(basis, example1_problem(0.1));
  const auto b = assemble(basis, example1_problem(0.1), threaded);
  EXPECT_EQ(a.matrix, b.matrix);
  EXPECT_EQ(a.rhs, b.rhs);
}

TEST(Assemble, QuadraturePolicyAndErrors) {
  const CardinalBasis basis = CardinalBasis::lgl(12);
  EXPECT_EQ(assemble(basis, example1_problem(0.1)).quad_order, 20);
  AssemblyOptions opts;
  opts.quad_order = 40;
  opts.quad_kind = RuleKind::LG;
  const auto sys = assemble(basis, example1_problem(0.1), opts);
  EXPECT_EQ(sys.quad_order, 40);
  EXPECT_EQ(sys.quad_kind, RuleKind::LG);
  opts.quad_order = 5;
  EXPECT_THROW(assemble(basis, example1_problem(0.1), opts), std::invalid_argument);

  const NonlocalProblem wide = example1_problem(1.5, true);
  EXPECT_THROW(assemble(basis, wide), std::invalid_argument);
  AssemblyOptions iv;
  iv.allow_case_iv = true;
  const auto s4 = assemble(basis, wide, iv);
  int case_iv = 0;
  for (std::size_t i = 0; i < s4.size(); ++i) {
    const bool both = std::abs(basis.nodes()[i]) < 0.5;
    EXPECT_EQ(s4.rows[i].row_case == RowCase::IV, both);
    case_iv += both;
  }
  EXPECT_GT(case_iv, 0);
  const auto u = solve_dense(s4).solution;
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(u[i], std::exp(4 * basis.nodes()[i]), 1e-6);
}
