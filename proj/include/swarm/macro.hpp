#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "swarm/model.hpp"
#include "swarm/scenario.hpp"

namespace swarm {

enum class MomentumMode { explicit_euler, implicit_euler };

MomentumMode parse_momentum_mode(const std::string& name);
const char* to_string(MomentumMode mode);

struct SolverConfig {
  double dt = 0.1;
  double T = 1.0;
  MomentumMode momentum = MomentumMode::implicit_euler;
  double D = 0.0;
  double linear_tol = 1e-10;
  int max_iter = 2000;
  /// Tolerance of the monitored leadership range [-tol, 1 + tol].
  double l_monitor_tol = 1e-6;

  void check() const;
};

/// Solver settings taken from a scenario (dt, T, and D from its parameters).
SolverConfig solver_defaults(const Scenario& scenario);

struct StencilOffset {
  int di = 0;
  int dj = 0;
  Vec2 r{0.0, 0.0};     // physical offset x* - x
  double inv_r2 = 0.0;  // 1/|r|^2, 0 for the self offset
};

/// Cell offsets whose centre lies within distance R, each weighted by one
/// cell area. Membership uses a 1e-12 relative slack so offsets sitting on
/// the circle are kept despite rounding.
struct Stencil {
  std::vector<StencilOffset> offsets;
  double weight = 0.0;

  static Stencil build(const Grid& grid, double radius);
  bool contains_zero() const;
  bool symmetric() const;
};

using VelocityField = std::array<std::vector<double>, 2>;

/// Nonlocal velocity source of the momentum equation, scaled by mu.
/// The self offset is skipped in the repulsion term only.
VelocityField nonlocal_source_velocity(const MacroState& state, const ModelParams& params,
                                       const Stencil& stencil);

/// Nonlocal leadership source, scaled by eta.
std::vector<double> nonlocal_source_leadership(const MacroState& state, const ModelParams& params,
                                               const Stencil& stencil);

/// dt * max_k max(|u1_k|, |u2_k|, |u_bc|) <= min(dx).
bool cfl_check(const VelocityField& u, const Grid& grid, double dt, double u_bc = 0.0);

/// Push-forward update. Ghost cells outside the domain carry (rho_bc, u_bc).
/// Throws NumericalError when the CFL condition fails.
std::vector<double> step_density(const std::vector<double>& rho, const VelocityField& u,
                                 const Grid& grid, double dt, const BoundaryConditions& bc = {});

/// One momentum step with the source frozen at time n. Values outside the
/// domain are u_bc; the boundary ring is overwritten with u_bc.
VelocityField step_momentum(const VelocityField& u, const VelocityField& source, const Grid& grid,
                            double dt, double D, MomentumMode mode, const BoundaryConditions& bc = {},
                            double linear_tol = 1e-10, int max_iter = 2000);

/// Bilinear (linear in 1D) interpolation between cell centres. Missing
/// corner nodes beyond the outermost centres hold bc_value, and points
/// outside the domain return bc_value.
double bilinear_interpolate(const std::vector<double>& field, const Vec2& point, const Grid& grid,
                            double bc_value);

/// Semi-Lagrangian step: l(x - dt u) + dt * source.
std::vector<double> step_leadership(const std::vector<double>& l, const VelocityField& u,
                                    const std::vector<double>& source, const Grid& grid, double dt,
                                    double l_bc = 0.0);

/// Writes the Dirichlet values into the outermost cell ring.
void impose_boundary(MacroState& state, const BoundaryConditions& bc);

struct MacroStepper {
  ModelParams params;
  BoundaryConditions bc;
  SolverConfig config;
  Stencil stencil;

  MacroStepper(const Grid& grid, const ModelParams& p, const BoundaryConditions& b,
               const SolverConfig& c);

  /// Advances one step: sources from state n, then rho, u, l, then the
  /// boundary ring.
  MacroState step(const MacroState& state) const;
};

using MacroObserver = std::function<void(int step, const MacroState&)>;

SnapshotSeries run_macro(const Scenario& scenario, const SolverConfig& config,
                         const MacroObserver& observer = {});

}  // namespace swarm
