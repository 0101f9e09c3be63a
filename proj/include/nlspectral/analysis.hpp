#ifndef NLSPECTRAL_ANALYSIS_HPP
#define NLSPECTRAL_ANALYSIS_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "nlspectral/assembler.hpp"
#include "nlspectral/basis.hpp"
#include "nlspectral/linsolve.hpp"
#include "nlspectral/model.hpp"

namespace nlspectral {

/// Evaluation grid used for sampled maximum errors.
inline constexpr int kDefaultGridSize = 2001;

/// Nodal values on a cardinal basis; evaluates u_N anywhere in [-1,1].
struct SpectralSolution {
  CardinalBasis basis;
  std::vector<double> nodal;

  double operator()(double x) const { return basis.interpolate(nodal, x); }
};

struct SolveSettings {
  RuleKind colloc_kind = RuleKind::LGL;
  AssemblyOptions assembly;
  SolveOptions solve;
};

struct SolvedProblem {
  SpectralSolution solution;
  SolveReport report;
  CollocationSystem system;
};

inline SolvedProblem solve_problem(const NonlocalProblem& problem, int order,
                                   const SolveSettings& settings = {}) {
  CardinalBasis basis(gauss_rule(settings.colloc_kind, order));
  CollocationSystem system = assemble(basis, problem, settings.assembly);
  SolveReport report = solve_dense(system, settings.solve);
  SpectralSolution solution{std::move(basis), report.solution};
  return {std::move(solution), std::move(report), std::move(system)};
}

struct ErrorRecord {
  int order = 0;        // N
  int quad_order = 0;   // M
  double horizon = 0.0;
  double max_error = 0.0;
  double argmax_x = 0.0;
  double residual_inf = 0.0;
  double wall_ms = 0.0;
};

struct SampledError {
  double max_error = 0.0;
  double where = 0.0;
};

/// max over a uniform grid on [-1,1] of |u(x) - exact(x)|; first maximizer wins.
template <class Approx, class Exact>
SampledError max_error(const Approx& approx, const Exact& exact, int grid_size = kDefaultGridSize) {
  if (grid_size < 2) throw std::invalid_argument("max_error: grid_size < 2");
  SampledError out;
  out.where = -1.0;
  for (int s = 0; s < grid_size; ++s) {
    const double x = -1.0 + 2.0 * s / (grid_size - 1);
    const double e = std::abs(approx(x) - exact(x));
    if (e > out.max_error) {
      out.max_error = e;
      out.where = x;
    }
  }
  return out;
}

/// Stability constant C = sup_{[-1,1]} (t(1-t)/2 + delta(1+delta)) = 1/8 + delta(1+delta).
struct BarrierBound {
  double horizon = 0.0;
  double constant = 0.0;
};

inline BarrierBound barrier_bound(double delta) { return {delta, 0.125 + delta * (1.0 + delta)}; }

inline ScalarFunction barrier_function(double delta) {
  return [delta](double t) { return t * (1.0 - t) / 2.0 + delta * (1.0 + delta); };
}

class MomentMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// max |L varpi(x) + 1| over the samples. The identity L varpi = -1 needs a
/// kernel with second moment 2; anything else raises MomentMismatch.
inline double check_barrier_identity(const Kernel& kernel, std::span<const double> sample_xs) {
  if (std::abs(kernel.second_moment - 2.0) > 1e-10) {
    throw MomentMismatch("barrier identity needs second moment 2, kernel has " +
                         std::to_string(kernel.second_moment));
  }
  const ScalarFunction varpi = barrier_function(kernel.horizon);
  double worst = 0.0;
  for (double x : sample_xs) {
    worst = std::max(worst, std::abs(apply_operator(kernel, varpi, x) + 1.0));
  }
  return worst;
}

enum class PrincipleStatus { Passed, Violated, HypothesisFailed };

inline std::string_view to_string(PrincipleStatus s) {
  switch (s) {
    case PrincipleStatus::Passed: return "passed";
    case PrincipleStatus::Violated: return "violated";
    case PrincipleStatus::HypothesisFailed: return "hypothesis-failed";
  }
  return "?";
}

struct MaxPrincipleReport {
  PrincipleStatus status = PrincipleStatus::Passed;
  double min_operator = 0.0;  // min sampled L u over [-1,1]
  double interior_max = 0.0;
  double exterior_max = 0.0;
};

inline constexpr double kPrincipleTolerance = 1e-10;

/// Samples u and L u on [-1,1] and u on the interaction domain. When
/// L u >= -tol everywhere sampled, checks max_I u <= max_{I_c} u + tol.
template <class U>
MaxPrincipleReport check_max_principle(const Kernel& kernel, const U& u, int samples) {
  if (samples < 2) throw std::invalid_argument("check_max_principle: samples < 2");
  const double delta = kernel.horizon;
  MaxPrincipleReport rep;
  rep.min_operator = std::numeric_limits<double>::infinity();
  rep.interior_max = -std::numeric_limits<double>::infinity();
  rep.exterior_max = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const double x = -1.0 + 2.0 * s / (samples - 1);
    rep.min_operator = std::min(rep.min_operator, apply_operator(kernel, u, x));
    rep.interior_max = std::max(rep.interior_max, u(x));
    // closed collar endpoints: the maximum of a continuous u is a supremum there
    const double t = delta * s / (samples - 1);
    rep.exterior_max = std::max({rep.exterior_max, u(-1.0 - t), u(1.0 + t)});
  }
  if (rep.min_operator < -kPrincipleTolerance) {
    rep.status = PrincipleStatus::HypothesisFailed;
  } else {
    rep.status = rep.interior_max <= rep.exterior_max + kPrincipleTolerance
                     ? PrincipleStatus::Passed
                     : PrincipleStatus::Violated;
  }
  return rep;
}

struct StabilityReport {
  double solution_norm = 0.0;  // sampled ||u_N||_inf
  double source_norm = 0.0;    // sampled ||f||_inf
  double constant = 0.0;       // C from BarrierBound
  double bound = 0.0;          // (C + slack) ||f||_inf
  bool within_bound = false;
};

inline constexpr double kStabilitySlack = 0.5;

/// Solves with zero constraint data and compares ||u_N|| with (C + 0.5)||f||.
inline StabilityReport stability_probe(double delta, int order, ScalarFunction f,
                                       const SolveSettings& settings = {}) {
  const NonlocalProblem problem = homogeneous_constraint_problem(delta, f);
  const SolvedProblem solved = solve_problem(problem, order, settings);
  const auto zero = [](double) { return 0.0; };
  StabilityReport rep;
  rep.solution_norm = max_error(solved.solution, zero).max_error;
  for (double v : solved.solution.nodal) rep.solution_norm = std::max(rep.solution_norm, std::abs(v));
  rep.source_norm = max_error(f, zero).max_error;
  rep.constant = barrier_bound(delta).constant;
  rep.bound = (rep.constant + kStabilitySlack) * rep.source_norm;
  rep.within_bound = rep.solution_norm <= rep.bound;
  return rep;
}

/// Quadrature order for the operator integrals as a function of N.
struct QuadPolicy {
  int fixed = -1;   // used when >= 0
  int offset = 8;   // otherwise M = N + offset

  int resolve(int order) const { return fixed >= 0 ? fixed : order + offset; }
};

/// Runs task(i) for i in [0, count) on up to jobs threads.
inline void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            task(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct SweepSettings {
  SolveSettings solve;
  QuadPolicy quad;
  int grid_size = kDefaultGridSize;
  unsigned jobs = 1;
};

inline ErrorRecord measure(const NonlocalProblem& problem, int order, const SweepSettings& settings) {
  if (!problem.exact) throw std::invalid_argument("measure: problem has no reference solution");
  const auto start = std::chrono::steady_clock::now();
  SolveSettings solve = settings.solve;
  solve.assembly.quad_order = settings.quad.resolve(order);
  const SolvedProblem solved = solve_problem(problem, order, solve);
  const SampledError err = max_error(solved.solution, *problem.exact, settings.grid_size);
  const auto stop = std::chrono::steady_clock::now();
  ErrorRecord rec;
  rec.order = order;
  rec.quad_order = solved.system.quad_order;
  rec.horizon = problem.horizon();
  rec.max_error = err.max_error;
  rec.argmax_x = err.where;
  rec.residual_inf = solved.report.residual_inf;
  rec.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return rec;
}

/// One record per N, in list order.
inline std::vector<ErrorRecord> sweep_n(const NonlocalProblem& problem, std::span<const int> orders,
                                        const SweepSettings& settings = {}) {
  if (!std::is_sorted(orders.begin(), orders.end())) {
    throw std::invalid_argument("sweep_n: N list must be ascending");
  }
  std::vector<ErrorRecord> records(orders.size());
  parallel_for(orders.size(), settings.jobs,
               [&](std::size_t i) { records[i] = measure(problem, orders[i], settings); });
  return records;
}

/// Ordinary least-squares slope of y against x.
inline double fit_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fit_slope: size mismatch");
  if (xs.size() < 2) throw std::invalid_argument("fit_slope: need at least two points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_slope: x values are all equal");
  return sxy / sxx;
}

/// Errors below this are treated as the solver floor. Manufactured problems
/// at small horizons sit near eps times the condition number (about 2e-10
/// at delta = 0.0125, N = 64), far under any modeling error of interest.
inline constexpr double kFloorThreshold = 1e-8;

struct DeltaSweep {
  std::vector<ErrorRecord> records;
  double slope = 0.0;  // d log10(error) / d log10(delta)
  bool floor_dominated = false;
};

using ProblemFactory = std::function<NonlocalProblem(double)>;

inline DeltaSweep sweep_delta(const ProblemFactory& factory, std::span<const double> deltas,
                              int order, const SweepSettings& settings = {}) {
  if (deltas.size() < 2) throw std::invalid_argument("sweep_delta: need at least two horizons");
  DeltaSweep out;
  out.records.resize(deltas.size());
  parallel_for(deltas.size(), settings.jobs, [&](std::size_t i) {
    out.records[i] = measure(factory(deltas[i]), order, settings);
  });
  std::vector<double> lx, ly;
  out.floor_dominated = true;
  for (const ErrorRecord& r : out.records) {
    lx.push_back(std::log10(r.horizon));
    ly.push_back(std::log10(std::max(r.max_error, std::numeric_limits<double>::min())));
    if (r.max_error > kFloorThreshold) out.floor_dominated = false;
  }
  out.slope = fit_slope(lx, ly);
  return out;
}

}  // namespace nlspectral

#endif  // NLSPECTRAL_ANALYSIS_HPP
