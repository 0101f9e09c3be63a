#ifndef NLSPECTRAL_QUADRATURE_HPP
#define NLSPECTRAL_QUADRATURE_HPP

#include <stdexcept>

#include "nlspectral/legendre.hpp"

namespace nlspectral {

/// Affine image of reference point t in [-1,1] on [a,b].
constexpr double map_to_interval(double t, double a, double b) {
  return 0.5 * (b - a) * t + 0.5 * (a + b);
}

/// (b-a)/2 * sum_j f(y(t_j)) w_j. A degenerate interval returns exactly 0.
template <class F>
double integrate(const QuadratureRule& rule, F&& f, double a, double b) {
  if (a > b) throw std::invalid_argument("integrate: a > b");
  if (a == b) return 0.0;
  double sum = 0.0;
  for (std::size_t j = 0; j < rule.size(); ++j) {
    sum += f(map_to_interval(rule.nodes[j], a, b)) * rule.weights[j];
  }
  return 0.5 * (b - a) * sum;
}

template <class F>
double integrate(const QuadratureRule& rule, F&& f) {
  return integrate(rule, std::forward<F>(f), -1.0, 1.0);
}

}  // namespace nlspectral

#endif  // NLSPECTRAL_QUADRATURE_HPP
