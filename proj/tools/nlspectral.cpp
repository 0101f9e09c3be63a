// Command-line front end: rule dumps, single solves, convergence sweeps and
// the invariant check suite.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlspectral/analysis.hpp"
#include "nlspectral/checks.hpp"
#include "nlspectral/config.hpp"
#include "nlspectral/io.hpp"

#ifndef NLSPECTRAL_GIT_HASH
#define NLSPECTRAL_GIT_HASH "unknown"
#endif

namespace {

using namespace nlspectral;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string problem = "example1";
  std::string config_path;
  int order = 16;
  std::string quad_order = "auto";
  std::optional<double> delta;
  std::string colloc_rule = "lgl";
  std::string quad_rule = "lgl";
  std::string output;
  std::string format = "csv";
  bool allow_case_iv = false;
  bool timing = false;
  unsigned jobs = 0;
};

RuleKind rule_or_throw(const std::string& s) {
  auto k = parse_rule_kind(s);
  if (!k) throw UsageError("unknown rule kind '" + s + "' (expected lg, lgr or lgl)");
  return *k;
}

unsigned resolve_jobs(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NLSPECTRAL_JOBS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

QuadPolicy quad_policy(const std::string& m) {
  if (m == "auto") return {};
  try {
    std::size_t used = 0;
    const int v = std::stoi(m, &used);
    if (used != m.size() || v < 1) throw std::invalid_argument("m");
    return {v, 0};
  } catch (const std::exception&) {
    throw UsageError("--m must be 'auto' or a positive integer");
  }
}

std::optional<CustomProblemConfig> custom_config(const RunConfig& cfg) {
  if (cfg.problem != "custom") return std::nullopt;
  if (cfg.config_path.empty()) throw ConfigError("problem 'custom' requires --config");
  return load_problem_config(cfg.config_path);
}

double resolve_delta(const RunConfig& cfg, const std::optional<CustomProblemConfig>& custom) {
  if (cfg.delta) return *cfg.delta;
  return custom ? custom->delta : 0.1;
}

void validate_format(const std::string& f) {
  if (f != "csv" && f != "json") throw UsageError("--format must be csv or json");
}

SweepSettings sweep_settings(const RunConfig& cfg) {
  SweepSettings s;
  s.solve.colloc_kind = rule_or_throw(cfg.colloc_rule);
  s.solve.assembly.quad_kind = rule_or_throw(cfg.quad_rule);
  s.solve.assembly.allow_case_iv = cfg.allow_case_iv;
  s.quad = quad_policy(cfg.quad_order);
  s.jobs = resolve_jobs(cfg.jobs);
  return s;
}

json meta_json(const RunConfig& cfg, const std::string& command) {
  return {{"command", command},
          {"problem", cfg.problem},
          {"collocation_rule", cfg.colloc_rule},
          {"quadrature_rule", cfg.quad_rule},
          {"quad_order_policy", cfg.quad_order},
          {"git_hash", NLSPECTRAL_GIT_HASH}};
}

/// Writes to path, or stdout when path is empty.
void emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << content;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  auto to_int = [&](const std::string& t) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(t, &used);
    } catch (const std::exception&) {
      throw UsageError("malformed integer list '" + s + "'");
    }
    if (used != t.size()) throw UsageError("malformed integer list '" + s + "'");
    return v;
  };
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw UsageError("range must be a:b:step");
    const int a = to_int(parts[0]), b = to_int(parts[1]), step = to_int(parts[2]);
    if (step <= 0 || b < a) throw UsageError("range must satisfy a <= b and step > 0");
    for (int v = a; v <= b; v += step) out.push_back(v);
  } else {
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(to_int(p));
  }
  if (out.empty()) throw UsageError("empty N list");
  return out;
}

std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string p; std::getline(ss, p, ',');) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(p, &used);
    } catch (const std::exception&) {
      throw UsageError("malformed delta list '" + s + "'");
    }
    if (used != p.size()) throw UsageError("malformed delta list '" + s + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty delta list");
  return out;
}

int cmd_nodes(const std::string& kind_name, int order, const std::string& format,
              const std::string& output) {
  validate_format(format);
  const RuleKind kind = rule_or_throw(kind_name);
  const QuadratureRule rule = gauss_rule(kind, order);
  std::ostringstream out;
  if (format == "csv") {
    out << "j,node,weight\n";
    for (std::size_t j = 0; j < rule.size(); ++j) {
      out << j << ',' << format_real(rule.nodes[j]) << ',' << format_real(rule.weights[j]) << '\n';
    }
  } else {
    json j = {{"kind", std::string(to_string(kind))},
              {"N", order},
              {"exact_degree", rule.exact_degree},
              {"nodes", rule.nodes},
              {"weights", rule.weights}};
    out << j.dump(2) << '\n';
  }
  emit(output, out.str());
  return kExitOk;
}

int cmd_solve(const RunConfig& cfg, const std::string& dump_system, bool condition) {
  validate_format(cfg.format);
  if (cfg.order < 2) throw UsageError("--n must be at least 2");
  const auto custom = custom_config(cfg);
  const double delta = resolve_delta(cfg, custom);
  const NonlocalProblem problem = problem_factory(cfg.problem, custom, cfg.allow_case_iv)(delta);

  SweepSettings settings = sweep_settings(cfg);
  settings.solve.assembly.quad_order = settings.quad.resolve(cfg.order);
  if (settings.solve.assembly.quad_order < cfg.order) throw UsageError("--m must be at least N");
  settings.solve.solve.estimate_condition = condition;

  const auto start = std::chrono::steady_clock::now();
  const SolvedProblem solved = solve_problem(problem, cfg.order, settings.solve);
  ErrorRecord rec;
  rec.order = cfg.order;
  rec.quad_order = solved.system.quad_order;
  rec.horizon = delta;
  rec.residual_inf = solved.report.residual_inf;
  rec.max_error = std::numeric_limits<double>::quiet_NaN();
  rec.argmax_x = std::numeric_limits<double>::quiet_NaN();
  if (problem.exact) {
    const SampledError err = max_error(solved.solution, *problem.exact);
    rec.max_error = err.max_error;
    rec.argmax_x = err.where;
  }
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  const double cond = solved.report.condition_estimate.value_or(std::numeric_limits<double>::quiet_NaN());

  if (!dump_system.empty()) {
    std::ostringstream a, b;
    write_matrix_csv(a, solved.system.matrix);
    write_vector_csv(b, solved.system.rhs);
    emit(dump_system + "_A.csv", a.str());
    emit(dump_system + "_b.csv", b.str());
  }

  const std::size_t grid = kDefaultGridSize;
  auto grid_x = [&](std::size_t s) { return -1.0 + 2.0 * static_cast<double>(s) / (grid - 1); };
  auto exact_at = [&](double x) {
    return problem.exact ? (*problem.exact)(x) : std::numeric_limits<double>::quiet_NaN();
  };

  if (cfg.format == "csv") {
    std::ostringstream summary;
    summary << kRecordCsvHeader << ",pivot_growth,condition_estimate\n";
    {
      std::ostringstream row;
      write_records_csv(row, std::span<const ErrorRecord>(&rec, 1), cfg.timing);
      std::string line = row.str();
      line = line.substr(line.find('\n') + 1);
      line.pop_back();
      summary << line << ',' << format_real(solved.report.pivot_growth) << ',' << format_real(cond) << '\n';
    }
    emit(cfg.output, summary.str());
    if (!cfg.output.empty()) {
      std::ostringstream g, n;
      g << "x,u_N,exact,abs_error\n";
      for (std::size_t s = 0; s < grid; ++s) {
        const double x = grid_x(s);
        const double u = solved.solution(x);
        const double e = exact_at(x);
        g << format_real(x) << ',' << format_real(u) << ',' << format_real(e) << ','
          << format_real(std::abs(u - e)) << '\n';
      }
      n << "k,x,u\n";
      for (std::size_t k = 0; k < solved.solution.nodal.size(); ++k) {
        n << k << ',' << format_real(solved.solution.basis.nodes()[k]) << ','
          << format_real(solved.solution.nodal[k]) << '\n';
      }
      emit(cfg.output + ".grid.csv", g.str());
      emit(cfg.output + ".nodes.csv", n.str());
    }
  } else {
    json j;
    j["meta"] = meta_json(cfg, "solve");
    j["records"] = json::array({record_to_json(rec, cfg.timing)});
    j["report"] = {{"residual_inf", solved.report.residual_inf},
                   {"pivot_growth", solved.report.pivot_growth},
                   {"condition_estimate", solved.report.condition_estimate
                                              ? json(*solved.report.condition_estimate)
                                              : json(nullptr)}};
    json nodes = json::array();
    for (std::size_t k = 0; k < solved.solution.nodal.size(); ++k) {
      nodes.push_back({{"k", k}, {"x", solved.solution.basis.nodes()[k]}, {"u", solved.solution.nodal[k]}});
    }
    j["nodes"] = nodes;
    json samples = json::array();
    for (std::size_t s = 0; s < grid; ++s) {
      const double x = grid_x(s);
      const double u = solved.solution(x);
      const double e = exact_at(x);
      samples.push_back({{"x", x}, {"u_N", u},
                         {"exact", std::isfinite(e) ? json(e) : json(nullptr)}});
    }
    j["grid"] = samples;
    emit(cfg.output, j.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, const std::string& mode, const std::string& n_list,
              const std::string& delta_list) {
  validate_format(cfg.format);
  if (mode != "n" && mode != "delta") throw UsageError("--mode must be n or delta");
  const auto custom = custom_config(cfg);
  const ProblemFactory factory = problem_factory(cfg.problem, custom, cfg.allow_case_iv);
  const SweepSettings settings = sweep_settings(cfg);

  std::vector<ErrorRecord> records;
  std::optional<DeltaSweep> delta_sweep;
  if (mode == "n") {
    if (n_list.empty()) throw UsageError("--n-list is required for --mode n");
    const std::vector<int> orders = parse_int_list(n_list);
    for (int n : orders) {
      if (n < 2) throw UsageError("every N must be at least 2");
      if (settings.quad.resolve(n) < n) throw UsageError("--m must be at least N");
    }
    if (!std::is_sorted(orders.begin(), orders.end())) throw UsageError("N list must be ascending");
    records = sweep_n(factory(resolve_delta(cfg, custom)), orders, settings);
  } else {
    if (delta_list.empty()) throw UsageError("--delta-list is required for --mode delta");
    const std::vector<double> deltas = parse_real_list(delta_list);
    if (deltas.size() < 2) throw UsageError("--delta-list needs at least two values");
    if (cfg.order < 2) throw UsageError("--n must be at least 2");
    if (settings.quad.resolve(cfg.order) < cfg.order) throw UsageError("--m must be at least N");
    for (double d : deltas) check_problem_horizon(d, cfg.allow_case_iv);
    delta_sweep = sweep_delta(factory, deltas, cfg.order, settings);
    records = delta_sweep->records;
  }

  std::ostringstream out;
  if (cfg.format == "csv") {
    write_records_csv(out, records, cfg.timing);
    if (delta_sweep) {
      out << "# slope=" << format_real(delta_sweep->slope)
          << " floor_dominated=" << (delta_sweep->floor_dominated ? "true" : "false") << '\n';
    }
  } else {
    json j;
    j["meta"] = meta_json(cfg, "sweep");
    j["meta"]["mode"] = mode;
    j["records"] = records_to_json(records, cfg.timing);
    if (delta_sweep) {
      j["slope"] = delta_sweep->slope;
      j["floor_dominated"] = delta_sweep->floor_dominated;
    }
    out << j.dump(2) << '\n';
  }
  emit(cfg.output, out.str());
  return kExitOk;
}

int cmd_check(std::uint64_t seed, bool inject_bad_moment, const std::string& output) {
  CheckSuiteOptions options;
  options.seed = seed;
  options.inject_bad_moment = inject_bad_moment;
  const CheckSuiteResult result = run_check_suite(options);
  emit(output, result.report());
  return result.all_passed() ? kExitOk : kExitCheckFailed;
}

void add_run_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--problem", cfg.problem, "example1 | local-limit | custom");
  cmd->add_option("--config", cfg.config_path, "Key-value file for --problem custom");
  cmd->add_option("--delta", cfg.delta, "Horizon");
  cmd->add_option("--m", cfg.quad_order, "Quadrature order M, or 'auto' (N + 8)");
  cmd->add_option("--colloc-rule", cfg.colloc_rule, "Collocation nodes: lg | lgr | lgl");
  cmd->add_option("--quad-rule", cfg.quad_rule, "Operator quadrature: lg | lgr | lgl");
  cmd->add_option("--output", cfg.output, "Output path (stdout when omitted)");
  cmd->add_option("--format", cfg.format, "csv | json");
  cmd->add_flag("--allow-case-iv", cfg.allow_case_iv, "Permit horizons above 1");
  cmd->add_flag("--timing", cfg.timing, "Record wall-clock times (output no longer reproducible)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral collocation solver for 1-D nonlocal diffusion with volume constraints"};
  app.require_subcommand(1);

  std::string nodes_kind = "lgl";
  int nodes_n = 4;
  std::string nodes_format = "csv", nodes_output;
  auto* nodes = app.add_subcommand("nodes", "Dump Gauss-type nodes and weights");
  nodes->add_option("--kind", nodes_kind, "lg | lgr | lgl");
  nodes->add_option("--n", nodes_n, "Order N (N+1 nodes)")->required();
  nodes->add_option("--format", nodes_format, "csv | json");
  nodes->add_option("--output", nodes_output, "Output path (stdout when omitted)");

  RunConfig solve_cfg;
  std::string dump_system;
  bool condition = false;
  auto* solve = app.add_subcommand("solve", "Solve one problem and sample the solution");
  add_run_options(solve, solve_cfg);
  solve->add_option("--n", solve_cfg.order, "Collocation order N");
  solve->add_option("--dump-system", dump_system, "Write A and b to <path>_A.csv and <path>_b.csv");
  solve->add_flag("--condition", condition, "Estimate the 1-norm condition number");

  RunConfig sweep_cfg;
  std::string mode = "n", n_list, delta_list;
  sweep_cfg.order = 64;
  auto* sweep = app.add_subcommand("sweep", "Convergence sweep over N or delta");
  add_run_options(sweep, sweep_cfg);
  sweep->add_option("--mode", mode, "n | delta");
  sweep->add_option("--n-list", n_list, "N values: a:b:step or comma list");
  sweep->add_option("--delta-list", delta_list, "Comma-separated horizons");
  sweep->add_option("--n", sweep_cfg.order, "Fixed N for --mode delta");
  sweep->add_option("--jobs", sweep_cfg.jobs, "Worker threads (default NLSPECTRAL_JOBS or #cpus)");

  std::uint64_t seed = 0;
  bool inject = false;
  std::string check_output;
  auto* check = app.add_subcommand("check", "Run the invariant suite");
  check->add_option("--seed", seed, "Seed for randomized checks");
  check->add_flag("--inject-bad-moment", inject, "Use a kernel with the wrong second moment in the barrier check");
  check->add_option("--output", check_output, "Report path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*nodes) return cmd_nodes(nodes_kind, nodes_n, nodes_format, nodes_output);
    if (*solve) return cmd_solve(solve_cfg, dump_system, condition);
    if (*sweep) return cmd_sweep(sweep_cfg, mode, n_list, delta_list);
    if (*check) return cmd_check(seed, inject, check_output);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SingularMatrix& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const RootFinderError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
