#ifndef NLSPECTRAL_CONFIG_HPP
#define NLSPECTRAL_CONFIG_HPP

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "nlspectral/analysis.hpp"
#include "nlspectral/expression.hpp"
#include "nlspectral/model.hpp"

namespace nlspectral {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// User-defined problem read from a key = value file:
///
///   # lines starting with '#' are comments
///   kernel = constant          # or: expression
///   gamma  = 3/delta^3         # kernel = expression only; x stands for |s|
///   delta  = 0.1
///   f      = 16*exp(4*x)
///   g      = exp(4*x)
///   exact  = exp(4*x)          # optional reference solution
///
/// Expressions may use the bound constant `delta`.
struct CustomProblemConfig {
  std::string kernel = "constant";
  std::string gamma;
  double delta = 0.1;
  std::string source;
  std::string constraint;
  std::optional<std::string> exact;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

inline CustomProblemConfig parse_problem_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = detail::trim(std::string_view(t).substr(0, eq));
    std::string value = detail::trim(std::string_view(t).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty() || value.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
    }
    if (!kv.emplace(key, value).second) {
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }

  CustomProblemConfig cfg;
  auto take = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  if (auto k = take("kernel")) cfg.kernel = *k;
  if (cfg.kernel != "constant" && cfg.kernel != "expression") {
    throw ConfigError("config: kernel must be 'constant' or 'expression'");
  }
  if (auto gm = take("gamma")) cfg.gamma = *gm;
  if (cfg.kernel == "expression" && cfg.gamma.empty()) {
    throw ConfigError("config: kernel = expression requires gamma");
  }
  if (auto d = take("delta")) {
    try {
      std::size_t used = 0;
      cfg.delta = std::stod(*d, &used);
      if (used != d->size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("config: delta is not a number");
    }
  }
  auto f = take("f");
  auto g = take("g");
  if (!f || !g) throw ConfigError("config: f and g are required");
  cfg.source = *f;
  cfg.constraint = *g;
  cfg.exact = take("exact");
  if (!kv.empty()) throw ConfigError("config: unknown key '" + kv.begin()->first + "'");
  return cfg;
}

inline CustomProblemConfig load_problem_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse_problem_config(in);
}

inline NonlocalProblem build_custom_problem(const CustomProblemConfig& cfg, double delta,
                                            bool allow_case_iv = false) {
  try {
    check_problem_horizon(delta, allow_case_iv);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  const std::map<std::string, double> constants = {{"delta", delta}};
  try {
    Kernel kernel = cfg.kernel == "constant"
                        ? constant_kernel(delta)
                        : make_kernel(delta, Expression::parse(cfg.gamma, constants),
                                      "expression:" + cfg.gamma);
    NonlocalProblem p{"custom", std::move(kernel), Expression::parse(cfg.source, constants),
                      Expression::parse(cfg.constraint, constants), std::nullopt};
    if (cfg.exact) p.exact = Expression::parse(*cfg.exact, constants);
    return p;
  } catch (const ExpressionError& e) {
    throw ConfigError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

/// Built-in problem by name ("example1", "local-limit") or "custom" with a
/// parsed config, as a function of the horizon.
inline ProblemFactory problem_factory(const std::string& name,
                                      std::optional<CustomProblemConfig> custom = std::nullopt,
                                      bool allow_case_iv = false) {
  if (name == "example1") {
    return [allow_case_iv](double d) { return example1_problem(d, allow_case_iv); };
  }
  if (name == "local-limit") {
    return [allow_case_iv](double d) { return local_limit_problem(d, allow_case_iv); };
  }
  if (name == "custom") {
    if (!custom) throw ConfigError("problem 'custom' requires --config");
    return [cfg = *custom, allow_case_iv](double d) {
      return build_custom_problem(cfg, d, allow_case_iv);
    };
  }
  throw ConfigError("unknown problem '" + name + "'");
}

}  // namespace nlspectral

#endif  // NLSPECTRAL_CONFIG_HPP
