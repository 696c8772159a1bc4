#include "circmotion/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "circmotion/checks.hpp"
#include "circmotion/output.hpp"

namespace circmotion {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct RunOptions {
  std::string scenario;
  std::string out_dir;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<std::uint64_t> seed;
  std::optional<int> record_every;
};

struct SweepOptions {
  RunOptions base;
  std::string param;
  std::vector<std::string> values;
  unsigned jobs = 0;
};

fs::path default_out_root() {
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "out";
}

fs::path output_dir(const Scenario& sc, const std::string& cli_out) {
  if (!cli_out.empty()) return cli_out;
  if (!sc.outputs.directory.empty()) return sc.outputs.directory;
  return default_out_root() / sc.name;
}

// Loads the scenario and applies command-line overrides, re-validating.
Scenario load(const RunOptions& opt) {
  Scenario sc = parse_scenario(resolve_scenario(opt.scenario));
  if (opt.dt) sc.integration.dt = *opt.dt;
  if (opt.t_end) sc.integration.t_end = *opt.t_end;
  if (opt.record_every) sc.integration.record_every = *opt.record_every;
  if (opt.seed) {
    if (!sc.initial.random) {
      throw ScenarioError(sc.name +
                          ": --seed applies only to scenarios with random initial conditions");
    }
    sc.initial.random->seed = *opt.seed;
  }
  validate_scenario(sc);
  return sc;
}

std::string summary(const Scenario& sc, const RunResult& r) {
  const ConvergenceReport& rep = r.report;
  std::ostringstream ss;
  ss << sc.name << ": " << (rep.converged ? "converged" : "not converged");
  if (rep.converged) ss << " at t = " << format_number(*rep.t_converged) << " s";
  ss << "\n  |p1| = " << format_number(rep.final.order_abs)
     << ", max omega error = " << format_number(rep.final.omega_error_max);
  if (rep.final.radius_error_max) {
    ss << ", max radius error = " << format_number(*rep.final.radius_error_max);
  }
  if (rep.final.centroid_distance) {
    ss << ", centroid distance = " << format_number(*rep.final.centroid_distance);
  }
  if (rep.final.pattern_residuals.size() > 1) {
    ss << "\n  pattern residuals =";
    for (Eigen::Index m = 0; m < rep.final.pattern_residuals.size(); ++m) {
      ss << ' ' << format_number(rep.final.pattern_residuals(m));
    }
  }
  if (rep.final.block_order_abs.size() > 1) {
    ss << "\n  block |p1| =";
    for (Eigen::Index b = 0; b < rep.final.block_order_abs.size(); ++b) {
      ss << ' ' << format_number(rep.final.block_order_abs(b));
    }
  }
  ss << "\n  lyapunov violations = " << rep.lyapunov_violations << '\n';
  return ss.str();
}

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const Scenario sc = load(opt);
    const RunResult r = run(sc);
    const fs::path dir = output_dir(sc, opt.out_dir);
    write_outputs(dir, sc, r);
    for (const auto& w : r.report.warnings) err << "warning: " << w << '\n';
    out << summary(sc, r) << "  outputs: " << dir.string() << '\n';
    return r.report.converged ? kExitOk : kExitNotConverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_list(std::ostream& out, std::ostream& err) {
  const auto names = list_bundled_scenarios();
  if (names.empty()) {
    err << "error: no scenarios found in " << bundled_scenario_dir().string() << '\n';
    return kExitError;
  }
  for (const auto& name : names) {
    out << name;
    try {
      const Scenario sc = parse_scenario(resolve_scenario(name));
      if (!sc.description.empty()) out << "\t" << sc.description;
    } catch (const std::exception& e) {
      err << "warning: " << e.what() << '\n';
    }
    out << '\n';
  }
  return kExitOk;
}

int cmd_verify(const std::string& suite, std::ostream& out, std::ostream& err) {
  std::vector<CheckResult> results;
  try {
    results = run_checks(suite);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  int failed = 0;
  for (const auto& r : results) {
    out << (r.passed ? "PASS" : "FAIL") << "  " << std::left << std::setw(11) << r.suite
        << std::setw(static_cast<int>(width) + 2) << r.name << r.detail << '\n';
    if (!r.passed) ++failed;
  }
  out << results.size() - failed << "/" << results.size() << " checks passed\n";
  return failed == 0 ? kExitOk : kExitNotConverged;
}

// Short parameter names map onto scenario fields; anything else is a dotted
// path such as "thresholds.radius_error".
std::vector<std::string> param_path(const std::string& param) {
  if (param == "K" || param == "kappa" || param == "Omega_d" || param == "c_d" ||
      param == "K_m" || param == "saturation") {
    return {"controller", param};
  }
  if (param == "dt" || param == "t_end" || param == "record_every") return {"integration", param};
  if (param == "seed") return {"initial", "random", "seed"};
  std::vector<std::string> path;
  std::stringstream ss(param);
  for (std::string part; std::getline(ss, part, '.');) path.push_back(part);
  return path;
}

Scenario with_param(const Scenario& base, const std::string& param, const std::string& value) {
  json j = json::parse(serialize_scenario(base));
  json* node = &j;
  for (const auto& key : param_path(param)) {
    if (!node->is_object()) throw ScenarioError("--param " + param + ": not an object path");
    node = &(*node)[key];
  }
  try {
    *node = json::parse(value);
  } catch (const json::parse_error&) {
    throw ScenarioError("--values: '" + value + "' is not a number or JSON literal");
  }
  return parse_scenario_text(j.dump(), base.name + " [" + param + "=" + value + "]");
}

std::string dir_name(const std::string& param, const std::string& value) {
  std::string name = param + "=" + value;
  for (char& c : name) {
    if (c == '/' || c == '\\' || c == ' ' || c == '[' || c == ']' || c == ',') c = '_';
  }
  return name;
}

int cmd_sweep(const SweepOptions& opt, std::ostream& out, std::ostream& err) {
  Scenario base;
  try {
    base = load(opt.base);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  const fs::path root = opt.base.out_dir.empty()
                            ? default_out_root() / (base.name + "_sweep_" + opt.param)
                            : fs::path(opt.base.out_dir);

  struct Outcome {
    std::string value;
    int code = kExitError;
    std::string text;
  };
  std::vector<Outcome> outcomes(opt.values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < opt.values.size(); i = next++) {
      Outcome& o = outcomes[i];
      o.value = opt.values[i];
      try {
        Scenario sc = with_param(base, opt.param, o.value);
        sc.outputs.directory.clear();
        const RunResult r = run(sc);
        const fs::path dir = root / dir_name(opt.param, o.value);
        write_outputs(dir, sc, r);
        o.code = r.report.converged ? kExitOk : kExitNotConverged;
        std::ostringstream ss;
        ss << (r.report.converged ? "converged" : "not converged");
        if (r.report.t_converged) ss << " t=" << format_number(*r.report.t_converged);
        ss << " |p1|=" << format_number(r.report.final.order_abs)
           << " violations=" << r.report.lyapunov_violations << "  " << dir.string();
        o.text = ss.str();
      } catch (const std::exception& e) {
        o.code = kExitError;
        o.text = std::string("error: ") + e.what();
      }
    }
  };

  unsigned jobs = opt.jobs ? opt.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(opt.values.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  int code = kExitOk;
  for (const auto& o : outcomes) {
    (o.code == kExitError ? err : out) << opt.param << "=" << o.value << ": " << o.text << '\n';
    if (o.code == kExitError) {
      code = kExitError;
    } else if (o.code == kExitNotConverged && code == kExitOk) {
      code = kExitNotConverged;
    }
  }
  return code;
}

void add_run_options(CLI::App* cmd, RunOptions& opt) {
  cmd->add_option("scenario", opt.scenario, "Bundled scenario name or path to a scenario file")
      ->required();
  cmd->add_option("--out", opt.out_dir, "Output directory");
  cmd->add_option("--dt", opt.dt, "Override the integration step (s)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--t-end", opt.t_end, "Override the simulated duration (s)");
  cmd->add_option("--seed", opt.seed, "Override the seed of random initial conditions");
  cmd->add_option("--record-every", opt.record_every, "Record every n-th step")
      ->check(CLI::PositiveNumber);
}

}  // namespace

void write_outputs(const fs::path& dir, const Scenario& sc, const RunResult& r) {
  fs::create_directories(dir);
  auto open = [&dir](const char* file) {
    std::ofstream f(dir / file, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / file).string());
    return f;
  };
  if (sc.outputs.trajectory) {
    auto f = open("trajectory.csv");
    write_trajectory_csv(f, r.trajectory, sc.outputs.heading_mod_2pi);
  }
  if (sc.outputs.metrics) {
    auto f = open("metrics.csv");
    write_metrics_csv(f, r.trajectory);
  }
  if (sc.outputs.report) {
    auto f = open("report.json");
    f << report_json(r.report, sc.name);
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Collective circular motion simulator"};
  app.name("circmotion");
  app.require_subcommand(1);

  RunOptions run_opt;
  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and write CSV/JSON outputs");
  add_run_options(run_cmd, run_opt);

  std::string suite = "all";
  auto* verify_cmd = app.add_subcommand("verify", "Run the built-in property checks");
  verify_cmd->add_option("--suite", suite, "all, potentials, graphs or lyapunov")
      ->check(CLI::IsMember({"all", "potentials", "graphs", "lyapunov"}));

  auto* list_cmd = app.add_subcommand("list-scenarios", "List the bundled scenarios");

  SweepOptions sweep_opt;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "Run scenario variants concurrently, one directory each");
  add_run_options(sweep_cmd, sweep_opt.base);
  sweep_cmd->add_option("--param", sweep_opt.param, "Parameter to vary (e.g. K or integration.dt)")
      ->required();
  sweep_cmd->add_option("--values", sweep_opt.values, "Values to try")->required();
  sweep_cmd->add_option("--jobs", sweep_opt.jobs, "Worker threads (default: hardware threads)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  if (*run_cmd) return cmd_run(run_opt, out, err);
  if (*verify_cmd) return cmd_verify(suite, out, err);
  if (*list_cmd) return cmd_list(out, err);
  if (*sweep_cmd) return cmd_sweep(sweep_opt, out, err);
  return kExitError;
}

}  // namespace circmotion
