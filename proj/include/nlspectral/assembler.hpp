#ifndef NLSPECTRAL_ASSEMBLER_HPP
#define NLSPECTRAL_ASSEMBLER_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string_view>
#include <thread>
#include <vector>

#include "nlspectral/basis.hpp"
#include "nlspectral/legendre.hpp"
#include "nlspectral/matrix.hpp"
#include "nlspectral/model.hpp"
#include "nlspectral/quadrature.hpp"

namespace nlspectral {

/// How the horizon ball around a collocation point meets [-1,1].
enum class RowCase {
  I,    // ball inside [-1,1]
  II,   // sticks out on the left
  III,  // sticks out on the right
  IV,   // sticks out on both sides (horizon > 1)
};

inline std::string_view to_string(RowCase c) {
  switch (c) {
    case RowCase::I: return "I";
    case RowCase::II: return "II";
    case RowCase::III: return "III";
    case RowCase::IV: return "IV";
  }
  return "?";
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Interior piece (a, b) of the ball and its exterior overhang pieces.
struct RowClassification {
  RowCase row_case = RowCase::I;
  Interval interior;
  std::vector<Interval> exterior;  // left piece first
};

inline RowClassification classify_row(double x, double delta) {
  const double lo = x - delta;
  const double hi = x + delta;
  const bool left = lo < -1.0;
  const bool right = hi > 1.0;
  RowClassification row;
  row.interior = {std::max(lo, -1.0), std::min(hi, 1.0)};
  if (left) row.exterior.push_back({lo, -1.0});
  if (right) row.exterior.push_back({1.0, hi});
  row.row_case = left ? (right ? RowCase::IV : RowCase::II) : (right ? RowCase::III : RowCase::I);
  return row;
}

struct AssemblyOptions {
  int quad_order = -1;  // M; negative selects N + 8
  RuleKind quad_kind = RuleKind::LGL;
  bool allow_case_iv = false;
  unsigned jobs = 1;
};

inline int resolve_quad_order(int requested, int n) { return requested < 0 ? n + 8 : requested; }

/// Dense collocation system A u = b with per-row horizon classification.
struct CollocationSystem {
  DenseMatrix matrix;
  std::vector<double> rhs;
  std::vector<RowClassification> rows;
  int order = 0;       // N
  int quad_order = 0;  // M
  double horizon = 0.0;
  RuleKind colloc_kind = RuleKind::LGL;
  RuleKind quad_kind = RuleKind::LGL;

  std::size_t size() const { return rhs.size(); }
};

/// int over the overhang pieces of g(y) gamma(|y - x|) dy.
inline double boundary_load(const Kernel& kernel, const ScalarFunction& g, double x,
                            const RowClassification& row, const QuadratureRule& rule) {
  double load = 0.0;
  for (const Interval& piece : row.exterior) {
    load += integrate(rule, [&](double y) { return g(y) * kernel(y - x); }, piece.lo, piece.hi);
  }
  return load;
}

namespace detail {

inline void assemble_rows(const CardinalBasis& basis, const NonlocalProblem& problem,
                          const QuadratureRule& rule, CollocationSystem& sys,
                          std::size_t begin, std::size_t end) {
  const std::size_t n = basis.size();
  const std::size_t m = rule.size();
  const Kernel& kernel = problem.kernel;
  // table[j * n + k] = h_k(y_j) for the current row
  std::vector<double> table(m * n);
  std::vector<double> kernel_weights(m);
  for (std::size_t i = begin; i < end; ++i) {
    const double xi = basis.nodes()[i];
    const RowClassification& row = sys.rows[i];
    const double a = row.interior.lo;
    const double b = row.interior.hi;
    const double half = 0.5 * (b - a);
    std::span<double> out = sys.matrix.row(i);
    std::fill(out.begin(), out.end(), 0.0);
    if (b > a) {
      for (std::size_t j = 0; j < m; ++j) {
        const double y = map_to_interval(rule.nodes[j], a, b);
        basis.eval_all(y, std::span<double>(table.data() + j * n, n));
        kernel_weights[j] = kernel(y - xi) * rule.weights[j];
      }
      for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += table[j * n + k] * kernel_weights[j];
        out[k] = half * s;
      }
    }
    out[i] -= kernel.self_term;
    sys.rhs[i] = problem.source(xi) - boundary_load(kernel, problem.constraint, xi, row, rule);
  }
}

}  // namespace detail

/// Collocation system on the basis nodes:
///   A[i][k] = (b_i - a_i)/2 sum_j h_k(y_ij) gamma(|y_ij - x_i|) w_j - [i == k] self_term
///   b[i]    = f(x_i) - int_{overhang} g(y) gamma(|y - x_i|) dy
/// with y_ij the rule nodes mapped onto the interior piece (a_i, b_i).
inline CollocationSystem assemble(const CardinalBasis& basis, const NonlocalProblem& problem,
                                  const AssemblyOptions& options = {}) {
  const int n_order = basis.order();
  const int m_order = resolve_quad_order(options.quad_order, n_order);
  if (m_order < n_order) throw std::invalid_argument("assemble: quadrature order M < N");
  const double delta = problem.horizon();
  if (delta > 1.0 && !options.allow_case_iv) {
    throw std::invalid_argument("assemble: horizon > 1 requires case IV to be enabled");
  }
  const QuadratureRule& rule = shared_rule(options.quad_kind, m_order);

  CollocationSystem sys;
  const std::size_t n = basis.size();
  sys.matrix = DenseMatrix(n, n);
  sys.rhs.assign(n, 0.0);
  sys.rows.reserve(n);
  for (double x : basis.nodes()) sys.rows.push_back(classify_row(x, delta));
  sys.order = n_order;
  sys.quad_order = m_order;
  sys.horizon = delta;
  sys.colloc_kind = basis.rule().kind;
  sys.quad_kind = options.quad_kind;

  const unsigned jobs = std::clamp<unsigned>(options.jobs, 1u, static_cast<unsigned>(n));
  if (jobs == 1) {
    detail::assemble_rows(basis, problem, rule, sys, 0, n);
  } else {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (n + jobs - 1) / jobs;
    for (std::size_t begin = 0; begin < n; begin += chunk) {
      const std::size_t end = std::min(n, begin + chunk);
      workers.emplace_back([&, begin, end] {
        detail::assemble_rows(basis, problem, rule, sys, begin, end);
      });
    }
  }
  return sys;
}

/// A * nodal.
inline std::vector<double> apply_discrete(const CollocationSystem& sys,
                                          std::span<const double> nodal) {
  if (nodal.size() != sys.size()) throw std::invalid_argument("apply_discrete: dimension mismatch");
  return sys.matrix.multiply(nodal);
}

}  // namespace nlspectral

#endif  // NLSPECTRAL_ASSEMBLER_HPP
