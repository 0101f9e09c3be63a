#ifndef NLSPECTRAL_MODEL_HPP
#define NLSPECTRAL_MODEL_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "nlspectral/legendre.hpp"
#include "nlspectral/quadrature.hpp"

namespace nlspectral {

using ScalarFunction = std::function<double(double)>;

/// Order of the Gauss rule used for kernel moments and the reference operator.
inline constexpr int kReferenceOrder = 64;

/// Radial kernel gamma(|s|) supported on |s| <= horizon.
struct Kernel {
  double horizon = 0.0;
  ScalarFunction profile;   // gamma(r), r in [0, horizon]
  double self_term = 0.0;   // int_{-delta}^{delta} gamma(|s|) ds
  double second_moment = 0.0;  // int_{-delta}^{delta} s^2 gamma(|s|) ds
  std::string name;

  double operator()(double r) const { return profile(std::abs(r)); }

  /// Same profile multiplied by factor.
  Kernel scaled(double factor) const {
    Kernel k = *this;
    k.profile = [p = profile, factor](double r) { return factor * p(r); };
    k.self_term *= factor;
    k.second_moment *= factor;
    k.name = name + "*" + std::to_string(factor);
    return k;
  }
};

namespace detail {

inline double radial_moment(const ScalarFunction& profile, double delta, int power) {
  const QuadratureRule& rule = shared_rule(RuleKind::LG, kReferenceOrder - 1);
  return 2.0 * integrate(rule, [&](double r) { return std::pow(r, power) * profile(r); },
                         0.0, delta);
}

inline void check_horizon(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("kernel horizon must be positive and finite");
  }
}

}  // namespace detail

/// Kernel from an arbitrary profile. Missing analytic values are filled by a
/// 64-point Gauss rule on [0, delta], doubled by symmetry.
inline Kernel make_kernel(double delta, ScalarFunction profile, std::string name,
                          std::optional<double> self_term = std::nullopt,
                          std::optional<double> second_moment = std::nullopt) {
  detail::check_horizon(delta);
  Kernel k;
  k.horizon = delta;
  k.profile = std::move(profile);
  k.name = std::move(name);
  k.self_term = self_term ? *self_term : detail::radial_moment(k.profile, delta, 0);
  k.second_moment = second_moment ? *second_moment : detail::radial_moment(k.profile, delta, 2);
  if (!(k.self_term > 0.0)) throw std::invalid_argument("kernel self-term must be positive");
  return k;
}

/// gamma = 3 / delta^3: self-term 6/delta^2, second moment 2.
inline Kernel constant_kernel(double delta) {
  detail::check_horizon(delta);
  const double c = 3.0 / (delta * delta * delta);
  return make_kernel(delta, [c](double) { return c; }, "constant",
                     6.0 / (delta * delta), 2.0);
}

/// The nonlocal operator applied to a known function,
///   int_{-delta}^{delta} (u(x + s) - u(x)) gamma(|s|) ds,
/// integrated with an (order+1)-point Gauss rule on each piece of the ball
/// split where x + s crosses +-1, so u may be piecewise (interior data glued
/// to g). Integrating the difference in the offset variable s keeps the ball
/// limits exact and the rounding error near eps |u| times the self-term.
template <class U>
double apply_operator(const Kernel& kernel, U&& u, double x, int order = kReferenceOrder) {
  const QuadratureRule& rule = shared_rule(RuleKind::LG, order);
  const double delta = kernel.horizon;
  double breaks[4] = {-delta, 0.0, 0.0, delta};
  int count = 1;
  for (double b : {-1.0, 1.0}) {
    const double s = b - x;
    if (s > -delta && s < delta) breaks[count++] = s;
  }
  breaks[count] = delta;
  const double ux = u(x);
  auto integrand = [&](double s) { return (u(x + s) - ux) * kernel(s); };
  double sum = 0.0;
  for (int piece = 0; piece < count; ++piece) {
    sum += integrate(rule, integrand, breaks[piece], breaks[piece + 1]);
  }
  return sum;
}

/// L u = f on [-1,1], u = g on (-1-delta,-1) U (1,1+delta).
struct NonlocalProblem {
  std::string name;
  Kernel kernel;
  ScalarFunction source;      // f
  ScalarFunction constraint;  // g
  std::optional<ScalarFunction> exact;

  double horizon() const { return kernel.horizon; }

  /// Exact solution on [-1,1] glued to g outside; requires exact.
  ScalarFunction extended_exact() const {
    if (!exact) throw std::logic_error("problem has no exact solution");
    return [u = *exact, g = constraint](double y) {
      return (y < -1.0 || y > 1.0) ? g(y) : u(y);
    };
  }
};

/// Horizons above 1 give rows truncated on both sides and must be opted in.
inline void check_problem_horizon(double delta, bool allow_case_iv = false) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("horizon must be positive");
  }
  if (delta > 1.0 && !allow_case_iv) {
    throw std::invalid_argument("horizon must lie in (0, 1] unless case IV is enabled");
  }
}

/// sinh(z)/z - 1 without cancellation for small z.
inline double sinhc_minus_one(double z) {
  if (std::abs(z) > 0.5) return std::sinh(z) / z - 1.0;
  const double z2 = z * z;
  double term = z2 / 6.0;
  double sum = term;
  for (int k = 2; k < 20 && term > 1e-18 * sum; ++k) {
    term *= z2 / ((2.0 * k) * (2.0 * k + 1.0));
    sum += term;
  }
  return sum;
}

/// L applied to e^{4x} under gamma = 3/delta^3, divided by e^{4x}:
///   3/delta^3 [ (e^{4 delta} - e^{-4 delta})/4 - 2 delta ].
inline double example1_source_factor(double delta) {
  return 6.0 / (delta * delta) * sinhc_minus_one(4.0 * delta);
}

/// Constant kernel, u = g = e^{4x}, manufactured source f = L e^{4x}.
inline NonlocalProblem example1_problem(double delta, bool allow_case_iv = false) {
  check_problem_horizon(delta, allow_case_iv);
  const double factor = example1_source_factor(delta);
  ScalarFunction u = [](double x) { return std::exp(4.0 * x); };
  return NonlocalProblem{"example1", constant_kernel(delta),
                         [factor](double x) { return factor * std::exp(4.0 * x); }, u, u};
}

/// Constant kernel and g = e^{4x}, with the local source u'' = 16 e^{4x}; the
/// reference e^{4x} is the local solution, so the error measures the
/// nonlocal-to-local modeling gap.
inline NonlocalProblem local_limit_problem(double delta, bool allow_case_iv = false) {
  check_problem_horizon(delta, allow_case_iv);
  ScalarFunction u = [](double x) { return std::exp(4.0 * x); };
  return NonlocalProblem{"local-limit", constant_kernel(delta),
                         [](double x) { return 16.0 * std::exp(4.0 * x); }, u, u};
}

/// Constant kernel with source f and zero constraint data.
inline NonlocalProblem homogeneous_constraint_problem(double delta, ScalarFunction f) {
  check_problem_horizon(delta);
  return NonlocalProblem{"homogeneous", constant_kernel(delta), std::move(f),
                         [](double) { return 0.0; }, std::nullopt};
}

}  // namespace nlspectral

#endif  // NLSPECTRAL_MODEL_HPP
