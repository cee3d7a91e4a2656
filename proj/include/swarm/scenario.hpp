#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "swarm/model.hpp"

namespace swarm {

/// Dirichlet data imposed on the outermost cell ring and outside the domain.
struct BoundaryConditions {
  double rho = 0.0;
  double u = 0.0;
  double l = 0.0;

  bool operator==(const BoundaryConditions&) const = default;
};

using ScalarField = std::function<double(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;

struct Scenario {
  std::string name;
  Grid grid;
  double T = 1.0;
  double dt = 0.1;
  ModelParams params;
  BoundaryConditions bc;
  ScalarField rho0;
  VectorField u0;
  ScalarField l0;
  /// Interior snapshots between the initial and the final one.
  int snapshot_count = 10;

  int steps() const;
  /// Step indices at which snapshots are emitted (always 0 and steps()).
  std::vector<int> snapshot_steps() const;
  /// Initial fields sampled at cell centres.
  MacroState initial_state() const;
};

/// Built-in names: test1d, test2da, test2db, test2db_lbc1, test2dc, custom.
const std::vector<std::string>& scenario_names();

/// Throws ConfigError listing the valid names when `name` is unknown.
Scenario build_scenario(std::string_view name);

/// The 1D micro/macro comparison setup on [0, 1/R], with dx = R/8 and
/// dt = epsilon (the particle consistency bound; the initial state is at rest).
Scenario make_test1d(double R, double epsilon = 1e-3);

struct Snapshot {
  int step = 0;
  MacroState state;
};

/// Ordered snapshots of one run plus provenance.
struct SnapshotSeries {
  Grid grid;
  ModelParams params;
  /// Free-form provenance: scenario, mode, seed, solver settings, version.
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<Snapshot> snapshots;

  const MacroState& final_state() const { return snapshots.back().state; }
  void set_meta(const std::string& key, const std::string& value);
  const std::string* find_meta(const std::string& key) const;
};

inline constexpr const char* kCodeVersion = "swarm-1.0.0";

}  // namespace swarm
