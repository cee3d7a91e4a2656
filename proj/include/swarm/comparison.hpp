#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "swarm/macro.hpp"
#include "swarm/micro.hpp"

namespace swarm {

struct ComparisonConfig {
  double T = 5.0;
  LeadershipRule rule = LeadershipRule::generalized;
  MomentumMode momentum = MomentumMode::implicit_euler;
  /// Momentum diffusion of the macro run (none in the 1D comparison).
  double D = 0.0;
};

struct ComparisonRow {
  double R = 0.0;
  double epsilon = 0.0;
  std::size_t N = 0;
  std::uint64_t seed = 0;
  double l2_rho = 0.0;
  double l2_rhou = 0.0;
  double l2_rhol = 0.0;
  double dx = 0.0;
  double dt = 0.0;
};

/// Micro/macro runs of the 1D test at a given (R, epsilon). Both scales share
/// the grid (dx = R/8) and the step dt = epsilon. The deterministic macro run
/// is cached per (R, epsilon) so repeated seeds only pay for the particles.
class ComparisonRunner {
 public:
  explicit ComparisonRunner(ComparisonConfig config = {}) : config_(config) {}

  ComparisonRow run(double R, double epsilon, std::size_t N, std::uint64_t seed);

  /// Final macro state for (R, epsilon), computed once.
  const MacroState& macro_final(double R, double epsilon);

  const ComparisonConfig& config() const { return config_; }

 private:
  ComparisonConfig config_;
  std::map<std::pair<double, double>, MacroState> macro_cache_;
};

ComparisonRow run_comparison_1d(double R, double epsilon, std::size_t N, std::uint64_t seed,
                                const ComparisonConfig& config = {});

/// Distances between two final states on the same grid (rho, rho*u, rho*l).
std::array<double, 3> moment_distances(const MacroState& micro, const MacroState& macro);

inline constexpr const char* kComparisonHeader = "R,epsilon,N,seed,l2_rho,l2_rhou,l2_rhol,dx,dt";
std::string format_comparison_row(const ComparisonRow& row);
void write_comparison_csv(const std::vector<ComparisonRow>& rows, const std::string& path);

}  // namespace swarm
