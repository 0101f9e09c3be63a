#ifndef NLSPECTRAL_BASIS_HPP
#define NLSPECTRAL_BASIS_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "nlspectral/legendre.hpp"

namespace nlspectral {

/// Lagrange cardinal basis h_0..h_N on the nodes of a Gauss-type rule.
///
/// Evaluation is barycentric (second form). The modal expansion
/// h_k = sum_p beta_{p,k} L_p with beta_{p,k} = L_p(x_k) w_k / gamma_p is kept
/// as an independent route for cross-checks; gamma_p is the discrete norm
/// sum_i L_p(x_i)^2 w_i, which equals 2/(2p+1) except gamma_N = 2/N on
/// Gauss-Lobatto nodes.
class CardinalBasis {
 public:
  explicit CardinalBasis(QuadratureRule rule) : rule_(std::move(rule)) {
    if (rule_.size() < 1) throw std::invalid_argument("CardinalBasis: empty node set");
    compute_barycentric_weights();
  }

  static CardinalBasis lgl(int order) { return CardinalBasis(gauss_rule(RuleKind::LGL, order)); }

  int order() const { return static_cast<int>(rule_.size()) - 1; }
  std::size_t size() const { return rule_.size(); }
  const QuadratureRule& rule() const { return rule_; }
  std::span<const double> nodes() const { return rule_.nodes; }
  std::span<const double> barycentric_weights() const { return bary_; }

  /// h_k(x); exactly 0 or 1 at a stored node.
  double eval_cardinal(std::size_t k, double x) const {
    if (k >= size()) throw std::out_of_range("eval_cardinal: index out of range");
    double denom = 0.0;
    double numer = 0.0;
    for (std::size_t j = 0; j < size(); ++j) {
      const double diff = x - rule_.nodes[j];
      if (diff == 0.0) return j == k ? 1.0 : 0.0;
      const double t = bary_[j] / diff;
      denom += t;
      if (j == k) numer = t;
    }
    return numer / denom;
  }

  /// Writes h_0(x)..h_N(x) into out (size N+1).
  void eval_all(double x, std::span<double> out) const {
    if (out.size() != size()) throw std::invalid_argument("eval_all: size mismatch");
    for (std::size_t j = 0; j < size(); ++j) {
      if (x == rule_.nodes[j]) {
        std::fill(out.begin(), out.end(), 0.0);
        out[j] = 1.0;
        return;
      }
    }
    double denom = 0.0;
    for (std::size_t j = 0; j < size(); ++j) {
      out[j] = bary_[j] / (x - rule_.nodes[j]);
      denom += out[j];
    }
    for (double& v : out) v /= denom;
  }

  /// sum_k u_k h_k(x).
  double interpolate(std::span<const double> nodal, double x) const {
    if (nodal.size() != size()) throw std::invalid_argument("interpolate: size mismatch");
    double numer = 0.0;
    double denom = 0.0;
    for (std::size_t j = 0; j < size(); ++j) {
      const double diff = x - rule_.nodes[j];
      if (diff == 0.0) return nodal[j];
      const double t = bary_[j] / diff;
      numer += t * nodal[j];
      denom += t;
    }
    return numer / denom;
  }

  double gamma(int p) const {
    const int n = order();
    if (p == n && rule_.kind == RuleKind::LGL) return 2.0 / n;
    return 2.0 / (2.0 * p + 1.0);
  }

  /// beta_{p,k}, row-major in p: entry [p * (N+1) + k].
  std::vector<double> modal_coefficients() const {
    const std::size_t n = size();
    std::vector<double> beta(n * n);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t p = 0; p < n; ++p) {
        const double lp = eval_legendre(static_cast<int>(p), rule_.nodes[k]).value;
        beta[p * n + k] = lp * rule_.weights[k] / gamma(static_cast<int>(p));
      }
    }
    return beta;
  }

  /// h_k(x) through the Legendre expansion.
  double eval_cardinal_modal(std::size_t k, double x) const {
    if (k >= size()) throw std::out_of_range("eval_cardinal_modal: index out of range");
    double sum = 0.0;
    for (std::size_t p = 0; p < size(); ++p) {
      const double lk = eval_legendre(static_cast<int>(p), rule_.nodes[k]).value;
      const double lx = eval_legendre(static_cast<int>(p), x).value;
      sum += lk * rule_.weights[k] / gamma(static_cast<int>(p)) * lx;
    }
    return sum;
  }

  /// max over a uniform sample of sum_k |h_k(x)|.
  double lebesgue_constant(int sample_count) const {
    if (sample_count < 10 * static_cast<int>(size())) {
      throw std::invalid_argument("lebesgue_constant: sample_count < 10(N+1)");
    }
    std::vector<double> h(size());
    double best = 0.0;
    for (int s = 0; s < sample_count; ++s) {
      const double x = -1.0 + 2.0 * s / (sample_count - 1);
      eval_all(x, h);
      double sum = 0.0;
      for (double v : h) sum += std::abs(v);
      best = std::max(best, sum);
    }
    return best;
  }

 private:
  // w_k = 1 / prod_{j != k} (x_k - x_j), with mantissa/exponent bookkeeping
  // so large N cannot overflow, then normalized by the largest magnitude.
  void compute_barycentric_weights() {
    const std::size_t n = size();
    std::vector<double> mant(n, 1.0);
    std::vector<long> expo(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
      double m = 1.0;
      long e = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == k) continue;
        m *= rule_.nodes[k] - rule_.nodes[j];
        int ex = 0;
        m = std::frexp(m, &ex);
        e += ex;
      }
      if (m == 0.0) throw std::invalid_argument("CardinalBasis: duplicate nodes");
      // 1 / (m * 2^e) = (1/m) * 2^-e
      int ex = 0;
      const double inv = std::frexp(1.0 / m, &ex);
      mant[k] = inv;
      expo[k] = ex - e;
    }
    const long emax = *std::max_element(expo.begin(), expo.end());
    bary_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      bary_[k] = std::ldexp(mant[k], static_cast<int>(expo[k] - emax));
    }
  }

  QuadratureRule rule_;
  std::vector<double> bary_;
};

}  // namespace nlspectral

#endif  // NLSPECTRAL_BASIS_HPP
