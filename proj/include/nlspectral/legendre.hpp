#ifndef NLSPECTRAL_LEGENDRE_HPP
#define NLSPECTRAL_LEGENDRE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nlspectral {

/// Value and first derivative of a Legendre polynomial at one point.
struct PolyEval {
  double value = 0.0;
  double derivative = 0.0;
};

/// Legendre polynomial L_n and its derivative by upward recurrence.
///
/// Values use (k+1) L_{k+1} = (2k+1) x L_k - k L_{k-1}. Derivatives use the
/// companion recurrence L'_{k+1} = L'_{k-1} + (2k+1) L_k, which is regular at
/// x = +-1 and reproduces L'_n(+-1) = (+-1)^{n+1} n(n+1)/2 without a special
/// case.
inline PolyEval eval_legendre(int n, double x) {
  if (n < 0) {
    throw std::invalid_argument("eval_legendre: degree must be non-negative");
  }
  if (!(std::abs(x) <= 1.0 + 1e-12)) {
    throw std::domain_error("eval_legendre: x outside [-1, 1]");
  }
  if (n == 0) return {1.0, 0.0};
  double p_prev = 1.0, p = x;    // L_{k-1}, L_k
  double d_prev = 0.0, d = 1.0;  // L'_{k-1}, L'_k
  for (int k = 1; k < n; ++k) {
    const double p_next = ((2.0 * k + 1.0) * x * p - k * p_prev) / (k + 1.0);
    const double d_next = d_prev + (2.0 * k + 1.0) * p;
    p_prev = p;
    p = p_next;
    d_prev = d;
    d = d_next;
  }
  return {p, d};
}

/// Second derivative of L_n from the Legendre ODE; closed form at the ends.
inline double legendre_second_derivative(int n, double x) {
  const double nn = static_cast<double>(n) * (n + 1.0);
  if (std::abs(x) >= 1.0) {
    // L''_n(+-1) = (+-1)^n (n-1) n (n+1) (n+2) / 8
    const double s = (n % 2 == 0) ? 1.0 : -1.0;
    return (x > 0 ? 1.0 : s) * (n - 1.0) * nn * (n + 2.0) / 8.0;
  }
  const PolyEval e = eval_legendre(n, x);
  return (2.0 * x * e.derivative - nn * e.value) / ((1.0 - x) * (1.0 + x));
}

enum class RuleKind { LG, LGR, LGL };

inline std::string_view to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::LG: return "lg";
    case RuleKind::LGR: return "lgr";
    case RuleKind::LGL: return "lgl";
  }
  return "?";
}

inline std::optional<RuleKind> parse_rule_kind(std::string_view s) {
  if (s == "lg" || s == "LG") return RuleKind::LG;
  if (s == "lgr" || s == "LGR") return RuleKind::LGR;
  if (s == "lgl" || s == "LGL") return RuleKind::LGL;
  return std::nullopt;
}

/// Highest polynomial degree integrated exactly by an (N+1)-point rule.
constexpr int exact_degree(RuleKind kind, int order) {
  switch (kind) {
    case RuleKind::LG: return 2 * order + 1;
    case RuleKind::LGR: return 2 * order;
    case RuleKind::LGL: return 2 * order - 1;
  }
  return 0;
}

/// Nodes and weights of a Legendre-Gauss-type rule with N+1 points on [-1,1].
struct QuadratureRule {
  RuleKind kind = RuleKind::LGL;
  int order = 0;  // N; the rule has N+1 nodes
  std::vector<double> nodes;
  std::vector<double> weights;
  int exact_degree = 0;

  std::size_t size() const { return nodes.size(); }
};

class RootFinderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Polynomial whose zeros are the free (non-endpoint) nodes of a rule, with
/// its derivative. LG: L_{N+1}; LGR: L_N + L_{N+1}; LGL: L'_N.
inline PolyEval defining_polynomial(RuleKind kind, int order, double x) {
  switch (kind) {
    case RuleKind::LG: return eval_legendre(order + 1, x);
    case RuleKind::LGR: {
      const PolyEval a = eval_legendre(order, x);
      const PolyEval b = eval_legendre(order + 1, x);
      return {a.value + b.value, a.derivative + b.derivative};
    }
    case RuleKind::LGL: {
      const PolyEval a = eval_legendre(order, x);
      return {a.derivative, legendre_second_derivative(order, x)};
    }
  }
  return {};
}

/// Residual of the polynomial named by the node-defining equations of each
/// rule: L_{N+1} (LG), L_N + L_{N+1} (LGR), (1 - x^2) L'_N (LGL).
inline double node_residual(RuleKind kind, int order, double x) {
  if (kind == RuleKind::LGL) {
    return (1.0 - x) * (1.0 + x) * eval_legendre(order, x).derivative;
  }
  return defining_polynomial(kind, order, x).value;
}

namespace detail {

constexpr int kMaxNewtonIterations = 100;

inline std::optional<double> newton_root(RuleKind kind, int order, double x) {
  for (int it = 0; it < kMaxNewtonIterations; ++it) {
    const PolyEval q = defining_polynomial(kind, order, x);
    if (q.derivative == 0.0 || !std::isfinite(q.derivative)) return std::nullopt;
    const double step = q.value / q.derivative;
    x -= step;
    if (!(std::abs(x) < 1.0)) return std::nullopt;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon()) {
      // one polishing step after convergence
      const PolyEval r = defining_polynomial(kind, order, x);
      if (r.derivative != 0.0) x -= r.value / r.derivative;
      return x;
    }
  }
  return std::nullopt;
}

inline int interior_root_count(RuleKind kind, int order) {
  switch (kind) {
    case RuleKind::LG: return order + 1;
    case RuleKind::LGR: return order;
    case RuleKind::LGL: return order - 1;
  }
  return 0;
}

// Chebyshev-like (cosine-spaced) starting points, ascending.
inline std::vector<double> initial_guesses(RuleKind kind, int order) {
  const int count = interior_root_count(kind, order);
  std::vector<double> g(static_cast<std::size_t>(count));
  const double pi = std::numbers::pi;
  for (int i = 0; i < count; ++i) {
    double x = 0.0;
    switch (kind) {
      case RuleKind::LG: {
        const int n = order + 1;
        x = -std::cos(pi * (i + 0.75) / (n + 0.5));
        break;
      }
      case RuleKind::LGR:
        x = -std::cos(2.0 * pi * (i + 1) / (2.0 * order + 1.0));
        break;
      case RuleKind::LGL:
        x = -std::cos(pi * (i + 1.0) / order);
        break;
    }
    g[static_cast<std::size_t>(i)] = x;
  }
  return g;
}

inline bool roots_valid(const std::vector<double>& roots, int expected) {
  if (static_cast<int>(roots.size()) != expected) return false;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (!(std::abs(roots[i]) < 1.0)) return false;
    if (i > 0 && !(roots[i] > roots[i - 1])) return false;
  }
  return true;
}

// Bracketing fallback: scan a cosine-spaced grid for sign changes, bisect,
// then polish with Newton.
inline std::vector<double> bracketed_roots(RuleKind kind, int order) {
  const int expected = interior_root_count(kind, order);
  const int samples = 40 * (order + 2);
  std::vector<double> roots;
  auto f = [&](double x) { return defining_polynomial(kind, order, x).value; };
  double x0 = -1.0 + 1e-15;
  double f0 = f(x0);
  for (int s = 1; s <= samples; ++s) {
    const double x1 = (s == samples)
                          ? 1.0 - 1e-15
                          : -std::cos(std::numbers::pi * s / samples);
    const double f1 = f(x1);
    if (f0 == 0.0) {
      roots.push_back(x0);
    } else if ((f0 < 0.0) != (f1 < 0.0) && f1 != 0.0) {
      double lo = x0, hi = x1, flo = f0;
      for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      double r = 0.5 * (lo + hi);
      if (auto polished = newton_root(kind, order, r);
          polished && *polished > x0 && *polished < x1) {
        r = *polished;
      }
      roots.push_back(r);
    }
    x0 = x1;
    f0 = f1;
  }
  if (!roots_valid(roots, expected)) {
    throw RootFinderError("gauss_rule: root finder failed for " +
                          std::string(to_string(kind)) +
                          " N=" + std::to_string(order));
  }
  return roots;
}

}  // namespace detail

/// Gauss-type rule with order+1 nodes: nodes from Newton iteration on the
/// defining polynomial (bisection fallback), weights from the closed forms
///   LG:  2 / ((1 - x^2) L'_{N+1}(x)^2)
///   LGR: (1 - x) / ((N+1)^2 L_N(x)^2)
///   LGL: 2 / (N (N+1) L_N(x)^2)
inline QuadratureRule gauss_rule(RuleKind kind, int order) {
  if (order < 0 || (kind == RuleKind::LGL && order < 1)) {
    throw std::invalid_argument("gauss_rule: order too small for " +
                                std::string(to_string(kind)));
  }
  const int expected = detail::interior_root_count(kind, order);
  std::vector<double> roots;
  roots.reserve(static_cast<std::size_t>(expected));
  bool newton_ok = true;
  for (double guess : detail::initial_guesses(kind, order)) {
    auto r = detail::newton_root(kind, order, guess);
    if (!r) {
      newton_ok = false;
      break;
    }
    roots.push_back(*r);
  }
  if (newton_ok) {
    std::sort(roots.begin(), roots.end());
    newton_ok = detail::roots_valid(roots, expected);
  }
  if (!newton_ok) roots = detail::bracketed_roots(kind, order);

  QuadratureRule rule;
  rule.kind = kind;
  rule.order = order;
  rule.exact_degree = exact_degree(kind, order);
  if (kind == RuleKind::LGR || kind == RuleKind::LGL) rule.nodes.push_back(-1.0);
  rule.nodes.insert(rule.nodes.end(), roots.begin(), roots.end());
  if (kind == RuleKind::LGL) rule.nodes.push_back(1.0);

  const std::size_t n = rule.nodes.size();
  if (kind != RuleKind::LGR) {
    // symmetric families: enforce exact reflection symmetry
    for (std::size_t i = 0; i < n / 2; ++i) {
      const double m = 0.5 * (rule.nodes[n - 1 - i] - rule.nodes[i]);
      rule.nodes[i] = -m;
      rule.nodes[n - 1 - i] = m;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(rule.nodes[i] > rule.nodes[i - 1])) {
      throw RootFinderError("gauss_rule: duplicate or unordered nodes");
    }
  }

  rule.weights.resize(n);
  const double big_n = order;
  for (std::size_t j = 0; j < n; ++j) {
    const double x = rule.nodes[j];
    double w = 0.0;
    switch (kind) {
      case RuleKind::LG: {
        const double d = eval_legendre(order + 1, x).derivative;
        w = 2.0 / ((1.0 - x) * (1.0 + x) * d * d);
        break;
      }
      case RuleKind::LGR: {
        const double l = eval_legendre(order, x).value;
        w = (1.0 - x) / ((big_n + 1.0) * (big_n + 1.0) * l * l);
        break;
      }
      case RuleKind::LGL: {
        const double l = eval_legendre(order, x).value;
        w = 2.0 / (big_n * (big_n + 1.0) * l * l);
        break;
      }
    }
    rule.weights[j] = w;
  }
  if (kind != RuleKind::LGR) {
    for (std::size_t i = 0; i < n / 2; ++i) {
      const double m = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
      rule.weights[i] = rule.weights[n - 1 - i] = m;
    }
  }
  return rule;
}

/// Process-wide cache of rules; returned references stay valid for the
/// lifetime of the program.
inline const QuadratureRule& shared_rule(RuleKind kind, int order) {
  static std::mutex mutex;
  static std::map<std::pair<RuleKind, int>, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{kind, order}];
  if (!slot) slot = std::make_unique<QuadratureRule>(gauss_rule(kind, order));
  return *slot;
}

}  // namespace nlspectral

#endif  // NLSPECTRAL_LEGENDRE_HPP
