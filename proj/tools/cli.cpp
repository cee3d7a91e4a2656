#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "swarm/comparison.hpp"
#include "swarm/config.hpp"
#include "swarm/macro.hpp"
#include "swarm/metrics.hpp"
#include "swarm/micro.hpp"
#include "swarm/snapshot_io.hpp"

namespace swarm {

namespace {

namespace fs = std::filesystem;

class UsageError : public Error {
 public:
  using Error::Error;
};

using Settings = std::map<std::string, std::string>;

// Flag-backed settings: every flag is also a config-file key.
struct Binding {
  std::string key;
  std::vector<std::string> values;
  CLI::Option* option = nullptr;
};

struct Command {
  CLI::App* app = nullptr;
  std::string config_path;
  std::vector<std::unique_ptr<Binding>> bindings;

  void bind(const std::string& key, const std::string& help, bool list = false) {
    auto b = std::make_unique<Binding>();
    b->key = key;
    b->option = app->add_option("--" + key, b->values, help);
    if (list) {
      b->option->delimiter(',')->expected(1, CLI::detail::expected_max_vector_size);
    } else {
      b->option->expected(1);
    }
    bindings.push_back(std::move(b));
  }

  bool knows(const std::string& key) const {
    for (const auto& b : bindings)
      if (b->key == key) return true;
    return false;
  }

  /// Config file values first, then flags on top.
  Settings resolve() const {
    Settings s;
    if (!config_path.empty()) {
      for (const auto& kv : parse_key_values(read_text_file(config_path))) {
        if (!knows(kv.key))
          throw UsageError(config_path + ":" + std::to_string(kv.line) + ": unknown key '" + kv.key + "'");
        s[kv.key] = kv.value;
      }
    }
    for (const auto& b : bindings) {
      if (b->option->count() == 0) continue;
      std::string joined;
      for (const auto& v : b->values) joined += (joined.empty() ? "" : ",") + v;
      s[b->key] = joined;
    }
    return s;
  }
};

const std::string* find(const Settings& s, const std::string& key) {
  auto it = s.find(key);
  return it == s.end() ? nullptr : &it->second;
}

double get_double(const Settings& s, const std::string& key, double fallback) {
  const std::string* v = find(s, key);
  return v ? parse_double(*v, "--" + key) : fallback;
}

long long get_int(const Settings& s, const std::string& key, long long fallback) {
  const std::string* v = find(s, key);
  return v ? parse_int(*v, "--" + key) : fallback;
}

std::vector<double> get_list(const Settings& s, const std::string& key, std::vector<double> fallback) {
  const std::string* v = find(s, key);
  if (!v) return fallback;
  std::vector<double> out;
  std::stringstream in(*v);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_double(item, "--" + key));
  if (out.empty()) throw UsageError("--" + key + " needs at least one value");
  return out;
}

std::string output_dir(const Settings& s) {
  if (const std::string* v = find(s, "out")) return *v;
  if (const char* env = std::getenv("SWARM_OUT"); env && *env) return env;
  return "swarm_out";
}

void write_manifest(const std::string& dir, const std::string& command, const Settings& resolved) {
  std::ofstream out(fs::path(dir) / "manifest.txt", std::ios::binary);
  if (!out) throw Error("cannot write manifest in '" + dir + "'");
  out << "# swarm " << command << " (" << kCodeVersion << ")\n";
  for (const auto& [k, v] : resolved) out << k << " = " << v << '\n';
}

std::vector<std::uint64_t> parse_seeds(const Settings& s) {
  std::vector<std::uint64_t> seeds;
  const std::string* v = find(s, "seed");
  if (!v) return {42};
  std::stringstream in(*v);
  std::string item;
  while (std::getline(in, item, ',')) {
    const long long seed = parse_int(item, "--seed");
    if (seed < 0) throw UsageError("--seed must be >= 0");
    seeds.push_back(static_cast<std::uint64_t>(seed));
  }
  return seeds;
}

// ---------------------------------------------------------------------------
// run

struct RunPlan {
  Scenario scenario;
  bool micro = false;
  MicroConfig micro_config;
  SolverConfig solver;
  std::string out;
  Settings resolved;
};

RunPlan plan_run(const Settings& s, std::ostream& err) {
  RunPlan plan;
  const std::string* name = find(s, "scenario");
  if (!name) throw UsageError("--scenario is required");
  plan.scenario = build_scenario(*name);
  Scenario& sc = plan.scenario;

  if (sc.name == "test1d" && (find(s, "R") || find(s, "epsilon"))) {
    sc = make_test1d(get_double(s, "R", sc.params.R), get_double(s, "epsilon", sc.params.epsilon));
  }
  for (const char* key : kParamKeys) {
    if (const std::string* v = find(s, key)) set_param(sc.params, key, parse_double(*v, std::string("--") + key));
  }
  for (const auto& w : validate(sc.params)) err << "warning: " << w << '\n';
  sc.bc.rho = get_double(s, "rho_bc", sc.bc.rho);
  sc.bc.u = get_double(s, "u_bc", sc.bc.u);
  sc.bc.l = get_double(s, "l_bc", sc.bc.l);
  sc.snapshot_count = static_cast<int>(get_int(s, "snapshots", sc.snapshot_count));
  if (sc.snapshot_count < 0) throw UsageError("--snapshots must be >= 0");
  sc.dt = get_double(s, "dt", sc.dt);
  sc.T = get_double(s, "T", sc.T);

  const std::string mode = find(s, "mode") ? *find(s, "mode") : "macro";
  if (mode != "micro" && mode != "macro")
    throw UsageError("--mode must be 'micro' or 'macro', got '" + mode + "'");
  plan.micro = mode == "micro";
  sc.steps();  // T must be a multiple of dt

  Settings& r = plan.resolved;
  r["scenario"] = sc.name;
  r["mode"] = mode;
  for (const char* key : kParamKeys) r[key] = format_double(get_param(sc.params, key));
  r["dt"] = format_double(sc.dt);
  r["T"] = format_double(sc.T);
  r["rho_bc"] = format_double(sc.bc.rho);
  r["u_bc"] = format_double(sc.bc.u);
  r["l_bc"] = format_double(sc.bc.l);
  r["snapshots"] = std::to_string(sc.snapshot_count);

  if (plan.micro) {
    if (sc.grid.dim != 1) throw UsageError("--mode micro supports 1D scenarios only (got '" + sc.name + "')");
    MicroConfig& m = plan.micro_config;
    const long long N = get_int(s, "N", static_cast<long long>(m.N));
    if (N < 2) throw UsageError("--N must be >= 2");
    m.N = static_cast<std::size_t>(N);
    m.dt = sc.dt;
    m.T = sc.T;
    if (const std::string* v = find(s, "rule")) m.rule = parse_leadership_rule(*v);
    const auto seeds = parse_seeds(s);
    if (seeds.size() != 1) throw UsageError("--seed takes a single value for run");
    m.seed = seeds[0];
    const double bound = consistency_bound(apply_scaling(sc.params));
    if (m.dt > bound * (1.0 + 1e-12))
      throw UsageError("--dt " + format_double(m.dt) + " exceeds the particle consistency bound " +
                       format_double(bound));
    r["N"] = std::to_string(m.N);
    r["rule"] = to_string(m.rule);
    r["seed"] = std::to_string(m.seed);
  } else {
    SolverConfig& c = plan.solver;
    c = solver_defaults(sc);
    if (const std::string* v = find(s, "momentum")) c.momentum = parse_momentum_mode(*v);
    c.linear_tol = get_double(s, "linear_tol", c.linear_tol);
    c.max_iter = static_cast<int>(get_int(s, "max_iter", c.max_iter));
    c.check();
    r["momentum"] = to_string(c.momentum);
    r["linear_tol"] = format_double(c.linear_tol);
    r["max_iter"] = std::to_string(c.max_iter);
  }
  plan.out = output_dir(s);
  r["out"] = plan.out;
  return plan;
}

int execute_run(const RunPlan& plan, std::ostream& out) {
  const SnapshotSeries series = plan.micro ? run_micro(plan.scenario, plan.micro_config)
                                           : run_macro(plan.scenario, plan.solver);
  write_snapshot(series, plan.out);
  write_manifest(plan.out, "run", plan.resolved);
  out << "wrote " << series.snapshots.size() << " snapshots to " << plan.out << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// compare1d

struct ComparePlan {
  std::vector<double> radii;
  std::vector<double> epsilons;
  std::size_t N = 100000;
  std::vector<std::uint64_t> seeds;
  ComparisonConfig config;
  std::string out;
  Settings resolved;
};

ComparePlan plan_compare(const Settings& s) {
  ComparePlan plan;
  plan.radii = get_list(s, "R", {0.02, 0.01});
  plan.epsilons = get_list(s, "eps", {1e-3, 1e-4});
  const long long N = get_int(s, "N", 100000);
  if (N < 2) throw UsageError("--N must be >= 2");
  plan.N = static_cast<std::size_t>(N);
  plan.seeds = parse_seeds(s);
  if (const std::string* v = find(s, "rule")) plan.config.rule = parse_leadership_rule(*v);
  if (const std::string* v = find(s, "momentum")) plan.config.momentum = parse_momentum_mode(*v);
  plan.config.T = get_double(s, "T", plan.config.T);
  for (double R : plan.radii)
    if (!(R > 0)) throw UsageError("--R values must be > 0");
  for (double e : plan.epsilons) {
    if (!(e > 0)) throw UsageError("--eps values must be > 0");
    Scenario probe = make_test1d(plan.radii.front(), e);
    probe.T = plan.config.T;
    probe.steps();
  }
  plan.out = output_dir(s);

  auto join = [](const auto& values, auto fmt) {
    std::string text;
    for (const auto& v : values) text += (text.empty() ? "" : ",") + fmt(v);
    return text;
  };
  Settings& r = plan.resolved;
  r["R"] = join(plan.radii, [](double v) { return format_double(v); });
  r["eps"] = join(plan.epsilons, [](double v) { return format_double(v); });
  r["N"] = std::to_string(plan.N);
  r["seed"] = join(plan.seeds, [](std::uint64_t v) { return std::to_string(v); });
  r["rule"] = to_string(plan.config.rule);
  r["momentum"] = to_string(plan.config.momentum);
  r["T"] = format_double(plan.config.T);
  r["out"] = plan.out;
  return plan;
}

int execute_compare(const ComparePlan& plan, std::ostream& out) {
  ComparisonRunner runner(plan.config);
  std::vector<ComparisonRow> rows;
  for (double R : plan.radii) {
    for (double eps : plan.epsilons) {
      for (std::uint64_t seed : plan.seeds) {
        rows.push_back(runner.run(R, eps, plan.N, seed));
        out << format_comparison_row(rows.back()) << '\n';
      }
    }
  }
  fs::create_directories(plan.out);
  write_comparison_csv(rows, (fs::path(plan.out) / "comparison.csv").string());
  write_manifest(plan.out, "compare1d", plan.resolved);
  return 0;
}

// ---------------------------------------------------------------------------
// metrics

int execute_metrics(const std::string& in, std::ostream& out) {
  const SnapshotSeries series = read_snapshot(in);
  out << "step,time,mass,centroid1,centroid2,support_radius,support_diameter,local_max_count,"
         "profile_peak_radius,ring\n";
  for (const auto& snap : series.snapshots) {
    const PatternMetrics m = pattern_metrics(snap.state.rho, series.grid);
    out << snap.step << ',' << format_double(snap.state.t) << ',' << format_double(m.mass) << ','
        << format_double(m.centroid[0]) << ',' << format_double(m.centroid[1]) << ','
        << format_double(m.support_radius) << ',' << format_double(m.support_diameter) << ','
        << m.local_max_count << ',' << format_double(m.profile_peak_radius()) << ','
        << (m.ring_present() ? 1 : 0) << '\n';
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiscale leader-follower swarm simulator"};
  app.require_subcommand(1);

  Command run;
  run.app = app.add_subcommand("run", "Run a scenario at the particle or continuum scale");
  run.app->add_option("--config", run.config_path, "key = value file; flags override it")
      ->check(CLI::ExistingFile);
  run.bind("scenario", "Scenario name");
  run.bind("mode", "micro or macro (default macro)");
  run.bind("out", "Output directory (default $SWARM_OUT, then ./swarm_out)");
  run.bind("seed", "Particle RNG seed");
  run.bind("N", "Particle count");
  run.bind("rule", "Leadership rule: generalized or binary");
  run.bind("dt", "Time step");
  run.bind("T", "Final time");
  run.bind("momentum", "Momentum scheme: implicit or explicit");
  run.bind("linear_tol", "Relative residual of the implicit solve");
  run.bind("max_iter", "Iteration cap of the implicit solve");
  run.bind("snapshots", "Interior snapshots between the initial and final one");
  run.bind("rho_bc", "Boundary density");
  run.bind("u_bc", "Boundary velocity");
  run.bind("l_bc", "Boundary leadership");
  for (const char* key : kParamKeys) run.bind(key, std::string("Model parameter ") + key);

  Command cmp;
  cmp.app = app.add_subcommand("compare1d", "Particle vs continuum L2 distances on the 1D test");
  cmp.app->add_option("--config", cmp.config_path, "key = value file; flags override it")
      ->check(CLI::ExistingFile);
  cmp.bind("R", "Interaction radii", true);
  cmp.bind("eps", "Scaling parameters", true);
  cmp.bind("N", "Particle count");
  cmp.bind("seed", "Seeds", true);
  cmp.bind("rule", "Leadership rule: generalized or binary");
  cmp.bind("momentum", "Momentum scheme: implicit or explicit");
  cmp.bind("T", "Final time");
  cmp.bind("out", "Output directory (default $SWARM_OUT, then ./swarm_out)");

  std::string metrics_in;
  CLI::App* metrics = app.add_subcommand("metrics", "Pattern metrics for each snapshot");
  metrics->add_option("--in", metrics_in, "Snapshot file or directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  }

  if (*metrics) {
    try {
      return execute_metrics(metrics_in, out);
    } catch (const ParseError& e) {
      err << "error: " << e.what() << '\n';
      return 1;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return 2;
    }
  }

  const bool is_run = static_cast<bool>(*run.app);
  RunPlan run_plan;
  ComparePlan cmp_plan;
  try {
    if (is_run) {
      run_plan = plan_run(run.resolve(), err);
    } else {
      cmp_plan = plan_compare(cmp.resolve());
    }
  } catch (const std::exception& e) {
    // Nothing has been written yet.
    err << "usage error: " << e.what() << '\n';
    return 1;
  }

  try {
    return is_run ? execute_run(run_plan, out) : execute_compare(cmp_plan, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace swarm
