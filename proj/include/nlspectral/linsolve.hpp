#ifndef NLSPECTRAL_LINSOLVE_HPP
#define NLSPECTRAL_LINSOLVE_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlspectral/assembler.hpp"
#include "nlspectral/matrix.hpp"

namespace nlspectral {

class SingularMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveReport {
  std::vector<double> solution;
  double residual_inf = 0.0;  // ||A u - b||_inf
  double pivot_growth = 0.0;  // max |U| / max |A|
  std::optional<double> condition_estimate;  // kappa_1(A), estimated
};

struct SolveOptions {
  bool refine = true;
  bool estimate_condition = false;
};

/// PA = LU with row partial pivoting, stored in place.
class LuFactorization {
 public:
  explicit LuFactorization(DenseMatrix a) : lu_(std::move(a)), perm_(lu_.rows()) {
    const std::size_t n = lu_.rows();
    if (n == 0 || lu_.cols() != n) throw std::invalid_argument("LuFactorization: matrix must be square and non-empty");
    const double scale = lu_.norm_inf();
    const double original_max = lu_.max_abs();
    const double tiny = 1e-14 * scale;
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      double best = std::abs(lu_(k, k));
      for (std::size_t i = k + 1; i < n; ++i) {
        if (std::abs(lu_(i, k)) > best) {
          best = std::abs(lu_(i, k));
          p = i;
        }
      }
      if (!(best >= tiny) || best == 0.0) {
        throw SingularMatrix("singular matrix: pivot " + std::to_string(best) + " at column " +
                             std::to_string(k));
      }
      if (p != k) {
        std::swap(perm_[k], perm_[p]);
        auto rk = lu_.row(k);
        auto rp = lu_.row(p);
        std::swap_ranges(rk.begin(), rk.end(), rp.begin());
      }
      const double pivot = lu_(k, k);
      for (std::size_t i = k + 1; i < n; ++i) {
        const double l = lu_(i, k) / pivot;
        lu_(i, k) = l;
        if (l == 0.0) continue;
        for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= l * lu_(k, j);
      }
    }
    double umax = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) umax = std::max(umax, std::abs(lu_(i, j)));
    pivot_growth_ = original_max > 0.0 ? umax / original_max : 0.0;
  }

  std::size_t size() const { return lu_.rows(); }
  double pivot_growth() const { return pivot_growth_; }

  /// Solves A x = b.
  std::vector<double> solve(std::span<const double> b) const {
    const std::size_t n = size();
    if (b.size() != n) throw std::invalid_argument("LuFactorization::solve: dimension mismatch");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = b[perm_[i]];
      for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
      x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = x[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
      x[i] = s / lu_(i, i);
    }
    return x;
  }

  /// Solves A^T x = b.
  std::vector<double> solve_transpose(std::span<const double> b) const {
    const std::size_t n = size();
    std::vector<double> z(b.begin(), b.end());
    // U^T z = b
    for (std::size_t i = 0; i < n; ++i) {
      double s = z[i];
      for (std::size_t j = 0; j < i; ++j) s -= lu_(j, i) * z[j];
      z[i] = s / lu_(i, i);
    }
    // L^T w = z
    for (std::size_t i = n; i-- > 0;) {
      double s = z[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= lu_(j, i) * z[j];
      z[i] = s;
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[perm_[i]] = z[i];
    return x;
  }

 private:
  DenseMatrix lu_;
  std::vector<std::size_t> perm_;
  double pivot_growth_ = 0.0;
};

namespace detail {

inline double norm_one(const DenseMatrix& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

// Hager's power-iteration estimate of ||A^{-1}||_1.
inline double inverse_norm_one_estimate(const LuFactorization& lu) {
  const std::size_t n = lu.size();
  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  double estimate = 0.0;
  for (int it = 0; it < 5; ++it) {
    const std::vector<double> y = lu.solve(x);
    double ynorm = 0.0;
    for (double v : y) ynorm += std::abs(v);
    if (it > 0 && ynorm <= estimate) break;
    estimate = ynorm;
    std::vector<double> sign(n);
    for (std::size_t i = 0; i < n; ++i) sign[i] = y[i] >= 0.0 ? 1.0 : -1.0;
    const std::vector<double> z = lu.solve_transpose(sign);
    std::size_t jmax = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(z[i]) > std::abs(z[jmax])) jmax = i;
    double ztx = 0.0;
    for (std::size_t i = 0; i < n; ++i) ztx += z[i] * x[i];
    if (std::abs(z[jmax]) <= ztx) break;
    std::fill(x.begin(), x.end(), 0.0);
    x[jmax] = 1.0;
  }
  return estimate;
}

inline std::vector<double> residual(const DenseMatrix& a, std::span<const double> x,
                                    std::span<const double> b) {
  std::vector<double> r = a.multiply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return r;
}

}  // namespace detail

/// Direct solve with optional one-step iterative refinement.
inline SolveReport solve_dense(const DenseMatrix& a, std::span<const double> b,
                               const SolveOptions& options = {}) {
  if (a.rows() != b.size()) throw std::invalid_argument("solve_dense: dimension mismatch");
  const LuFactorization lu(a);
  SolveReport report;
  report.solution = lu.solve(b);
  if (options.refine) {
    const std::vector<double> r = detail::residual(a, report.solution, b);
    const std::vector<double> dx = lu.solve(r);
    for (std::size_t i = 0; i < dx.size(); ++i) report.solution[i] += dx[i];
  }
  report.residual_inf = norm_inf(detail::residual(a, report.solution, b));
  report.pivot_growth = lu.pivot_growth();
  if (options.estimate_condition) {
    report.condition_estimate = detail::norm_one(a) * detail::inverse_norm_one_estimate(lu);
  }
  return report;
}

inline SolveReport solve_dense(const CollocationSystem& system, const SolveOptions& options = {}) {
  return solve_dense(system.matrix, system.rhs, options);
}

}  // namespace nlspectral

#endif  // NLSPECTRAL_LINSOLVE_HPP
