#ifndef NLSPECTRAL_CHECKS_HPP
#define NLSPECTRAL_CHECKS_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "nlspectral/analysis.hpp"
#include "nlspectral/assembler.hpp"
#include "nlspectral/basis.hpp"
#include "nlspectral/legendre.hpp"
#include "nlspectral/linsolve.hpp"
#include "nlspectral/model.hpp"
#include "nlspectral/quadrature.hpp"

namespace nlspectral {

enum class CheckStatus { Pass, Fail, Skip };

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::string detail;
};

struct CheckSuiteOptions {
  std::uint64_t seed = 0;
  /// Replaces the barrier-check kernel by one with twice the second moment.
  bool inject_bad_moment = false;
};

struct CheckSuiteResult {
  std::vector<CheckResult> checks;

  bool all_passed() const {
    for (const auto& c : checks)
      if (c.status == CheckStatus::Fail) return false;
    return true;
  }

  std::string report() const {
    std::string out;
    int pass = 0, fail = 0, skip = 0;
    for (const auto& c : checks) {
      const char* tag = c.status == CheckStatus::Pass ? "PASS" : c.status == CheckStatus::Fail ? "FAIL" : "SKIP";
      (c.status == CheckStatus::Pass ? pass : c.status == CheckStatus::Fail ? fail : skip)++;
      out += std::string(tag) + "  " + c.name + "  " + c.detail + "\n";
    }
    out += "summary: " + std::to_string(pass) + " passed, " + std::to_string(fail) + " failed, " +
           std::to_string(skip) + " skipped\n";
    return out;
  }
};

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

/// Monomial-coefficient polynomial with Horner evaluation.
struct Poly {
  std::vector<double> c;

  double operator()(double x) const {
    double s = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) s = s * x + c[k];
    return s;
  }
  double integral(double a, double b) const {
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      const double e = static_cast<double>(k) + 1.0;
      s += c[k] * (std::pow(b, e) - std::pow(a, e)) / e;
    }
    return s;
  }
  // sum |c_k| int_{-1}^{1} |x|^k dx
  double magnitude() const {
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) s += std::abs(c[k]) * 2.0 / (k + 1.0);
    return s;
  }
};

inline Poly random_poly(std::mt19937_64& rng, int degree) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Poly p;
  p.c.resize(static_cast<std::size_t>(degree) + 1);
  for (double& v : p.c) v = coef(rng);
  return p;
}

inline CheckResult make_check(std::string name, bool ok, std::string detail) {
  return {std::move(name), ok ? CheckStatus::Pass : CheckStatus::Fail, std::move(detail)};
}

}  // namespace detail

/// Invariant suite behind `check`; output is a pure function of the options.
inline CheckSuiteResult run_check_suite(const CheckSuiteOptions& options = {}) {
  using detail::sci;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  CheckSuiteResult suite;
  auto guard = [&](const std::string& name, const std::function<CheckResult()>& body) {
    try {
      suite.checks.push_back(body());
    } catch (const std::exception& e) {
      suite.checks.push_back({name, CheckStatus::Fail, std::string("exception: ") + e.what()});
    }
  };
  const RuleKind kinds[] = {RuleKind::LG, RuleKind::LGR, RuleKind::LGL};

  guard("legendre-endpoints", [&] {
    double worst = 0.0;
    bool bounded = true;
    for (int n = 0; n <= 40; ++n) {
      worst = std::max(worst, std::abs(eval_legendre(n, 1.0).value - 1.0));
      worst = std::max(worst, std::abs(eval_legendre(n, -1.0).value - (n % 2 ? -1.0 : 1.0)));
      for (int s = 0; s < 50; ++s) bounded = bounded && std::abs(eval_legendre(n, unit(rng)).value) <= 1.0 + 1e-14;
    }
    return detail::make_check("legendre-endpoints", worst <= 1e-14 && bounded, "max_dev=" + sci(worst));
  });

  guard("node-residuals", [&] {
    double residual = 0.0, weight_sum = 0.0;
    for (RuleKind k : kinds) {
      for (int n : {1, 2, 3, 8, 16, 32, 64, 128}) {
        const QuadratureRule r = gauss_rule(k, n);
        double s = 0.0;
        for (std::size_t j = 0; j < r.size(); ++j) {
          residual = std::max(residual, std::abs(node_residual(k, n, r.nodes[j])));
          s += r.weights[j];
        }
        weight_sum = std::max(weight_sum, std::abs(s - 2.0));
      }
    }
    return detail::make_check("node-residuals", residual <= 1e-12 && weight_sum <= 1e-13,
                              "max_residual=" + sci(residual) + " max_weight_sum_dev=" + sci(weight_sum));
  });

  guard("quadrature-exactness", [&] {
    double worst = 0.0;
    for (RuleKind k : kinds) {
      for (int n : {2, 4, 8, 16}) {
        const QuadratureRule r = gauss_rule(k, n);
        for (int trial = 0; trial < 50; ++trial) {
          const detail::Poly p = detail::random_poly(rng, r.exact_degree);
          worst = std::max(worst, std::abs(integrate(r, p) - p.integral(-1, 1)) / p.magnitude());
        }
      }
    }
    return detail::make_check("quadrature-exactness", worst <= 1e-12, "max_rel_err=" + sci(worst));
  });

  guard("small-rules", [&] {
    const QuadratureRule lgl = gauss_rule(RuleKind::LGL, 2);
    const QuadratureRule lg = gauss_rule(RuleKind::LG, 1);
    const double s3 = 1.0 / std::sqrt(3.0);
    double dev = 0.0;
    const double lgl_x[] = {-1, 0, 1}, lgl_w[] = {1.0 / 3, 4.0 / 3, 1.0 / 3};
    for (int i = 0; i < 3; ++i) dev = std::max({dev, std::abs(lgl.nodes[i] - lgl_x[i]), std::abs(lgl.weights[i] - lgl_w[i])});
    const double lg_x[] = {-s3, s3};
    for (int i = 0; i < 2; ++i) dev = std::max({dev, std::abs(lg.nodes[i] - lg_x[i]), std::abs(lg.weights[i] - 1.0)});
    return detail::make_check("small-rules", dev <= 1e-14, "max_dev=" + sci(dev));
  });

  guard("basis-cardinality", [&] {
    bool ok = true;
    for (int n : {4, 8, 16, 32}) {
      const CardinalBasis b = CardinalBasis::lgl(n);
      for (std::size_t k = 0; k < b.size(); ++k)
        for (std::size_t j = 0; j < b.size(); ++j)
          ok = ok && b.eval_cardinal(k, b.nodes()[j]) == (j == k ? 1.0 : 0.0);
    }
    return detail::make_check("basis-cardinality", ok, ok ? "exact" : "mismatch");
  });

  guard("partition-of-unity", [&] {
    double worst = 0.0;
    for (int n : {4, 16, 32, 64}) {
      const CardinalBasis b = CardinalBasis::lgl(n);
      std::vector<double> h(b.size());
      for (int s = 0; s < 100; ++s) {
        b.eval_all(unit(rng), h);
        double sum = 0.0;
        for (double v : h) sum += v;
        worst = std::max(worst, std::abs(sum - 1.0));
      }
    }
    return detail::make_check("partition-of-unity", worst <= 1e-12, "max_dev=" + sci(worst));
  });

  guard("barycentric-vs-modal", [&] {
    double worst = 0.0;
    for (int n : {4, 8, 16, 32}) {
      const CardinalBasis b = CardinalBasis::lgl(n);
      for (int s = 0; s < 100; ++s) {
        const double x = unit(rng);
        const std::size_t k = static_cast<std::size_t>(s) % b.size();
        worst = std::max(worst, std::abs(b.eval_cardinal(k, x) - b.eval_cardinal_modal(k, x)));
      }
    }
    return detail::make_check("barycentric-vs-modal", worst <= 1e-10, "max_dev=" + sci(worst));
  });

  guard("manufactured-source", [&] {
    double worst = 0.0;
    for (double delta : {0.1, 0.25}) {
      const NonlocalProblem p = example1_problem(delta);
      const auto u = p.extended_exact();
      std::uniform_real_distribution<double> interior(-1.0 + delta, 1.0 - delta);
      std::uniform_real_distribution<double> edge(0.0, delta);
      for (int s = 0; s < 70; ++s) {
        double x = s < 50 ? interior(rng) : (s % 2 ? -1.0 + edge(rng) : 1.0 - edge(rng));
        const double ref = apply_operator(p.kernel, u, x);
        worst = std::max(worst, std::abs(ref - p.source(x)));
      }
    }
    return detail::make_check("manufactured-source", worst <= 1e-11, "max_abs_dev=" + sci(worst));
  });

  guard("oracle-equivalence", [&] {
    double worst = 0.0;
    for (double delta : {0.05, 0.1, 0.5}) {
      for (int n : {4, 8, 16}) {
        const detail::Poly p = detail::random_poly(rng, n);
        const NonlocalProblem prob{"poly", constant_kernel(delta), [](double) { return 0.0; }, p, p};
        const CardinalBasis basis = CardinalBasis::lgl(n);
        const CollocationSystem sys = assemble(basis, prob);
        std::vector<double> nodal;
        for (double x : basis.nodes()) nodal.push_back(p(x));
        const std::vector<double> au = apply_discrete(sys, nodal);
        for (std::size_t i = 0; i < basis.size(); ++i) {
          const double xi = basis.nodes()[i];
          // rhs holds f - load with f = 0, so the load is -rhs
          const double disc = au[i] - sys.rhs[i];
          worst = std::max(worst, std::abs(disc - apply_operator(prob.kernel, p, xi)));
        }
      }
    }
    return detail::make_check("oracle-equivalence", worst <= 1e-10, "max_dev=" + sci(worst));
  });

  for (double delta : {0.1, 0.5}) {
    const std::string name = "barrier-identity(delta=" + std::string(delta == 0.1 ? "0.1" : "0.5") + ")";
    guard(name, [&] {
      Kernel k = constant_kernel(delta);
      if (options.inject_bad_moment) k = k.scaled(2.0);
      std::vector<double> xs;
      std::uniform_real_distribution<double> interior(-1.0 + delta, 1.0 - delta);
      for (int s = 0; s < 20; ++s) xs.push_back(interior(rng));
      try {
        const double dev = check_barrier_identity(k, xs);
        return detail::make_check(name, dev <= 1e-11, "max_dev=" + sci(dev));
      } catch (const MomentMismatch& e) {
        return CheckResult{name, CheckStatus::Skip, std::string("MomentMismatch: ") + e.what()};
      }
    });
  }

  guard("max-principle", [&] {
    const Kernel k = constant_kernel(0.1);
    const auto sq = [](double x) { return x * x; };
    const auto neg = [](double x) { return -x * x; };
    const auto cst = [](double) { return 3.0; };
    const MaxPrincipleReport a = check_max_principle(k, sq, 201);
    const MaxPrincipleReport b = check_max_principle(k, cst, 201);
    const MaxPrincipleReport c = check_max_principle(k, neg, 201);
    const bool ok = a.status == PrincipleStatus::Passed && b.status == PrincipleStatus::Passed &&
                    c.status == PrincipleStatus::HypothesisFailed;
    return detail::make_check("max-principle", ok,
                              "x^2:" + std::string(to_string(a.status)) + " const:" +
                                  std::string(to_string(b.status)) + " -x^2:" + std::string(to_string(c.status)));
  });

  guard("homogeneous-stability", [&] {
    double worst = 0.0;
    for (int n : {8, 16, 32}) {
      const StabilityReport r = stability_probe(0.1, n, [](double) { return 0.0; });
      worst = std::max(worst, r.solution_norm);
    }
    return detail::make_check("homogeneous-stability", worst <= 1e-11, "max_norm=" + sci(worst));
  });

  guard("stability-bound", [&] {
    const StabilityReport a = stability_probe(0.1, 32, [](double) { return 1.0; });
    const StabilityReport b = stability_probe(0.1, 32, [](double x) { return std::sin(std::numbers::pi * x); });
    return detail::make_check("stability-bound", a.within_bound && b.within_bound,
                              "f=1:" + sci(a.solution_norm) + "<=" + sci(a.bound) +
                                  " f=sin:" + sci(b.solution_norm) + "<=" + sci(b.bound));
  });

  guard("dense-solver", [&] {
    double worst = 0.0;
    for (int n : {2, 8, 32, 128}) {
      DenseMatrix a(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
      std::vector<double> x(static_cast<std::size_t>(n));
      for (std::size_t i = 0; i < a.rows(); ++i) {
        double off = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) {
          a(i, j) = unit(rng);
          off += std::abs(a(i, j));
        }
        a(i, i) = off + 1.0;
        x[i] = unit(rng);
      }
      const std::vector<double> b = a.multiply(x);
      const SolveReport r = solve_dense(a, b);
      for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(r.solution[i] - x[i]));
    }
    return detail::make_check("dense-solver", worst <= 1e-11, "max_err=" + sci(worst));
  });

  guard("case-coverage", [&] {
    bool ok = true;
    const CardinalBasis b = CardinalBasis::lgl(16);
    for (double delta : {0.01, 0.1, 0.5, 1.0}) {
      const CollocationSystem sys = assemble(b, example1_problem(delta));
      ok = ok && sys.rows.front().row_case == RowCase::II && sys.rows.back().row_case == RowCase::III;
    }
    double gap = 1.0;
    for (double x : b.nodes()) if (std::abs(x) < 1.0) gap = std::min(gap, 1.0 - std::abs(x));
    const CardinalBasis inner(gauss_rule(RuleKind::LG, 16));
    double inner_gap = 1.0;
    for (double x : inner.nodes()) inner_gap = std::min(inner_gap, 1.0 - std::abs(x));
    const CollocationSystem sys = assemble(inner, example1_problem(0.5 * inner_gap));
    for (const auto& r : sys.rows) ok = ok && r.row_case == RowCase::I;
    return detail::make_check("case-coverage", ok, ok ? "endpoint rows II/III, small horizon all I" : "mismatch");
  });

  guard("assembly-determinism", [&] {
    const CardinalBasis b = CardinalBasis::lgl(24);
    const NonlocalProblem p = example1_problem(0.1);
    const CollocationSystem s1 = assemble(b, p);
    AssemblyOptions threaded;
    threaded.jobs = 4;
    const CollocationSystem s2 = assemble(b, p, threaded);
    const bool ok = s1.matrix == s2.matrix && s1.rhs == s2.rhs;
    return detail::make_check("assembly-determinism", ok, ok ? "bit-identical" : "differs");
  });

  guard("spectral-decay", [&] {
    const NonlocalProblem p = example1_problem(0.1);
    const double e8 = measure(p, 8, {}).max_error;
    const double e16 = measure(p, 16, {}).max_error;
    const double e24 = measure(p, 24, {}).max_error;
    const bool ok = e16 <= 1e-3 * e8 && (e24 <= 1e-2 * e16 || e24 <= 1e-12);
    return detail::make_check("spectral-decay", ok, "e8=" + sci(e8) + " e16=" + sci(e16) + " e24=" + sci(e24));
  });

  return suite;
}

}  // namespace nlspectral

#endif  // NLSPECTRAL_CHECKS_HPP
