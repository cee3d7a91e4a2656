#include "swarm/comparison.hpp"

#include <fstream>

#include "swarm/config.hpp"
#include "swarm/metrics.hpp"

namespace swarm {

namespace {

Scenario comparison_scenario(double R, double epsilon, const ComparisonConfig& config) {
  Scenario s = make_test1d(R, epsilon);
  s.T = config.T;
  s.dt = epsilon;
  s.params.D = config.D;
  s.snapshot_count = 0;
  return s;
}

}  // namespace

std::array<double, 3> moment_distances(const MacroState& micro, const MacroState& macro) {
  const Grid& g = macro.grid;
  if (!(micro.grid == g)) throw ConfigError("moment_distances: grids differ");
  return {l2_distance(micro.rho, macro.rho, g),
          l2_distance(product(micro.rho, micro.u[0]), product(macro.rho, macro.u[0]), g),
          l2_distance(product(micro.rho, micro.l), product(macro.rho, macro.l), g)};
}

const MacroState& ComparisonRunner::macro_final(double R, double epsilon) {
  const auto key = std::make_pair(R, epsilon);
  auto it = macro_cache_.find(key);
  if (it == macro_cache_.end()) {
    const Scenario s = comparison_scenario(R, epsilon, config_);
    SolverConfig solver = solver_defaults(s);
    solver.momentum = config_.momentum;
    it = macro_cache_.emplace(key, run_macro(s, solver).final_state()).first;
  }
  return it->second;
}

ComparisonRow ComparisonRunner::run(double R, double epsilon, std::size_t N, std::uint64_t seed) {
  const Scenario s = comparison_scenario(R, epsilon, config_);
  MicroConfig micro;
  micro.N = N;
  micro.dt = s.dt;
  micro.T = s.T;
  micro.rule = config_.rule;
  micro.seed = seed;
  const SnapshotSeries particles = run_micro(s, micro);
  const auto d = moment_distances(particles.final_state(), macro_final(R, epsilon));

  ComparisonRow row;
  row.R = R;
  row.epsilon = epsilon;
  row.N = N;
  row.seed = seed;
  row.l2_rho = d[0];
  row.l2_rhou = d[1];
  row.l2_rhol = d[2];
  row.dx = s.grid.dx[0];
  row.dt = s.dt;
  return row;
}

ComparisonRow run_comparison_1d(double R, double epsilon, std::size_t N, std::uint64_t seed,
                                const ComparisonConfig& config) {
  ComparisonRunner runner(config);
  return runner.run(R, epsilon, N, seed);
}

std::string format_comparison_row(const ComparisonRow& r) {
  return format_double(r.R) + ',' + format_double(r.epsilon) + ',' + std::to_string(r.N) + ',' +
         std::to_string(r.seed) + ',' + format_double17(r.l2_rho) + ',' + format_double17(r.l2_rhou) +
         ',' + format_double17(r.l2_rhol) + ',' + format_double17(r.dx) + ',' + format_double17(r.dt);
}

void write_comparison_csv(const std::vector<ComparisonRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << kComparisonHeader << '\n';
  for (const auto& r : rows) out << format_comparison_row(r) << '\n';
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace swarm
