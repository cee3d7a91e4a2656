#include "swarm/macro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include "swarm/config.hpp"

namespace swarm {

namespace {

// Field value at (i, j) with out-of-domain indices mapped to `outside`.
struct Padded {
  const std::vector<double>& f;
  const Grid& g;
  double outside;

  double operator()(int i, int j) const {
    if (i < 0 || i >= g.n[0] || j < 0 || j >= g.n[1]) return outside;
    return f[g.index(i, j)];
  }
};

// Floor for the bounded node coordinates used here; avoids a libm call in
// the per-cell loops.
inline int floor_int(double s) {
  const int t = static_cast<int>(s);
  return t > s ? t - 1 : t;
}

// Position in node units (node k sits at k). Values within a few ulps of a
// node snap onto it so departure points that land on a centre reproduce the
// node value exactly instead of mixing in a 1e-16 share of a neighbour.
inline double node_coordinate(double x, double dx) {
  const double s = x / dx - 0.5;
  const double nearest = floor_int(s + 0.5);
  return std::abs(s - nearest) <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(s))
             ? nearest
             : s;
}

// Bilinear interpolant through cell centres with ghost nodes holding
// `outside`; points outside the domain take `outside` directly.
inline double interpolate(const double* f, const Grid& g, double x, double y, double outside) {
  if (x < 0.0 || x > g.extent[0]) return outside;
  const double s1 = node_coordinate(x, g.dx[0]);
  const int i = std::clamp(floor_int(s1), -1, g.n[0] - 1);
  const double t1 = s1 - i;  // (zeta1 - x1_i) / dx1
  if (g.dim == 1) {
    const double left = i >= 0 ? f[i] : outside;
    const double right = i + 1 < g.n[0] ? f[i + 1] : outside;
    return (1.0 - t1) * left + t1 * right;
  }
  if (y < 0.0 || y > g.extent[1]) return outside;
  const double s2 = node_coordinate(y, g.dx[1]);
  const int j = std::clamp(floor_int(s2), -1, g.n[1] - 1);
  const double t2 = s2 - j;
  auto at = [&](int a, int b) {
    return a < 0 || a >= g.n[0] || b < 0 || b >= g.n[1] ? outside : f[g.index(a, b)];
  };
  const double pi1 = (1.0 - t1) * (1.0 - t2);
  const double pi2 = t1 * (1.0 - t2);
  const double pi3 = t1 * t2;
  const double pi4 = (1.0 - t1) * t2;
  return pi1 * at(i, j) + pi2 * at(i + 1, j) + pi3 * at(i + 1, j + 1) + pi4 * at(i, j + 1);
}

bool on_ring(const Grid& g, int i, int j) {
  if (i == 0 || i == g.n[0] - 1) return true;
  return g.dim == 2 && (j == 0 || j == g.n[1] - 1);
}

double diffusion_number(const Grid& g, double D, double dt) {
  return g.dim == 2 ? D * dt / (g.dx[0] * g.dx[1]) : D * dt / (g.dx[0] * g.dx[0]);
}

// Thomas algorithm for rows sub[k] x[k-1] + diag[k] x[k] + sup[k] x[k+1] = rhs[k]
// supplied by `row(k)`; sub of the first and sup of the last row are ignored.
template <typename Row>
std::vector<double> solve_tridiagonal(std::size_t n, Row row) {
  std::vector<double> sup_prime(n), x(n);
  double prev_sup = 0.0, prev_rhs = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto [sub, diag, sup, rhs] = row(k);
    const double lower = k > 0 ? sub : 0.0;
    const double inv = 1.0 / (diag - lower * prev_sup);
    prev_sup = sup * inv;
    prev_rhs = (rhs - lower * prev_rhs) * inv;
    sup_prime[k] = prev_sup;
    x[k] = prev_rhs;
  }
  for (std::size_t k = n - 1; k-- > 0;) x[k] -= sup_prime[k] * x[k + 1];
  return x;
}

}  // namespace

MomentumMode parse_momentum_mode(const std::string& name) {
  if (name == "explicit") return MomentumMode::explicit_euler;
  if (name == "implicit") return MomentumMode::implicit_euler;
  throw ConfigError("unknown momentum mode '" + name + "' (valid: explicit, implicit)");
}

const char* to_string(MomentumMode mode) {
  return mode == MomentumMode::explicit_euler ? "explicit" : "implicit";
}

void SolverConfig::check() const {
  if (!(dt > 0) || !std::isfinite(dt)) throw ConfigError("solver: dt must be > 0");
  if (!(T >= 0) || !std::isfinite(T)) throw ConfigError("solver: T must be >= 0");
  if (!(D >= 0) || !std::isfinite(D)) throw ConfigError("solver: D must be >= 0");
  if (!(linear_tol > 0)) throw ConfigError("solver: linear_tol must be > 0");
  if (max_iter < 1) throw ConfigError("solver: max_iter must be >= 1");
}

SolverConfig solver_defaults(const Scenario& scenario) {
  SolverConfig c;
  c.dt = scenario.dt;
  c.T = scenario.T;
  c.D = scenario.params.D;
  return c;
}

// ---------------------------------------------------------------------------
// Stencil

Stencil Stencil::build(const Grid& grid, double radius) {
  Stencil s;
  s.weight = grid.cell_area();
  const double limit = radius * radius * (1.0 + 1e-12);
  const int reach1 = static_cast<int>(std::ceil(radius / grid.dx[0])) + 1;
  const int reach2 = grid.dim == 2 ? static_cast<int>(std::ceil(radius / grid.dx[1])) + 1 : 0;
  for (int dj = -reach2; dj <= reach2; ++dj) {
    for (int di = -reach1; di <= reach1; ++di) {
      StencilOffset o;
      o.di = di;
      o.dj = dj;
      o.r = {di * grid.dx[0], grid.dim == 2 ? dj * grid.dx[1] : 0.0};
      const double r2 = o.r[0] * o.r[0] + o.r[1] * o.r[1];
      if (r2 > limit) continue;
      o.inv_r2 = r2 > 0.0 ? 1.0 / r2 : 0.0;
      s.offsets.push_back(o);
    }
  }
  return s;
}

bool Stencil::contains_zero() const {
  return std::any_of(offsets.begin(), offsets.end(),
                     [](const StencilOffset& o) { return o.di == 0 && o.dj == 0; });
}

bool Stencil::symmetric() const {
  std::set<std::pair<int, int>> seen;
  for (const auto& o : offsets) seen.emplace(o.di, o.dj);
  return std::all_of(offsets.begin(), offsets.end(),
                     [&](const StencilOffset& o) { return seen.count({-o.di, -o.dj}) == 1; });
}

// ---------------------------------------------------------------------------
// Nonlocal sources
//
// Both sources loop over stencil offsets outside and over target cells
// inside, so the inner loop runs over contiguous rows.

namespace {

struct Sources {
  VelocityField velocity;
  std::vector<double> leadership;
};

// Accumulates the requested sources in one sweep over the stencil.
Sources accumulate_sources(const MacroState& state, const ModelParams& params, const Stencil& stencil,
                           bool want_velocity, bool want_leadership) {
  const Grid& g = state.grid;
  const int n0 = g.n[0], n1 = g.n[1];
  Sources out;
  if (want_velocity)
    out.velocity = {std::vector<double>(g.cells(), 0.0), std::vector<double>(g.cells(), 0.0)};
  if (want_leadership) out.leadership.assign(g.cells(), 0.0);
  const double half_beta = 0.5 * params.beta0;
  const double nu = params.nu;
  const bool two_d = g.dim == 2;

  for (const auto& o : stencil.offsets) {
    const double rep1 = -params.alpha0 * o.r[0] * o.inv_r2;  // alpha0 (x - x*)/|x - x*|^2
    const double rep2 = -params.alpha0 * o.r[1] * o.inv_r2;
    const double att1 = params.gamma0 * o.r[0];
    const double att2 = params.gamma0 * o.r[1];
    const int i_lo = std::max(0, -o.di), i_hi = std::min(n0, n0 - o.di);
    const int j_lo = std::max(0, -o.dj), j_hi = std::min(n1, n1 - o.dj);
    const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(o.dj) * n0 + o.di;
    for (int j = j_lo; j < j_hi; ++j) {
      const std::size_t row = static_cast<std::size_t>(j) * n0;
      const double* __restrict rho = state.rho.data() + row + shift;
      const double* __restrict ls = state.l.data() + row + shift;
      const double* __restrict l = state.l.data() + row;
      if (want_leadership) {
        double* __restrict gl = out.leadership.data() + row;
        for (int i = i_lo; i < i_hi; ++i) gl[i] += rho[i] * (1.0 - 2.0 * l[i] + nu * (l[i] - ls[i]));
      }
      if (!want_velocity) continue;
      const double* __restrict u1s = state.u[0].data() + row + shift;
      const double* __restrict u1 = state.u[0].data() + row;
      double* __restrict g1 = out.velocity[0].data() + row;
      if (!two_d) {
        for (int i = i_lo; i < i_hi; ++i) {
          const double lead = half_beta * (ls[i] - l[i]);
          g1[i] += rho[i] * (lead * (u1s[i] - u1[i]) + rep1 + (1.0 - l[i]) * att1);
        }
        continue;
      }
      const double* __restrict u2s = state.u[1].data() + row + shift;
      const double* __restrict u2 = state.u[1].data() + row;
      double* __restrict g2 = out.velocity[1].data() + row;
      for (int i = i_lo; i < i_hi; ++i) {
        const double lead = half_beta * (ls[i] - l[i]);
        const double follow = 1.0 - l[i];
        g1[i] += rho[i] * (lead * (u1s[i] - u1[i]) + rep1 + follow * att1);
        g2[i] += rho[i] * (lead * (u2s[i] - u2[i]) + rep2 + follow * att2);
      }
    }
  }
  const double velocity_scale = params.mu * stencil.weight;
  for (auto& comp : out.velocity)
    for (double& v : comp) v *= velocity_scale;
  const double leadership_scale = params.eta * stencil.weight;
  for (double& v : out.leadership) v *= leadership_scale;
  return out;
}

}  // namespace

VelocityField nonlocal_source_velocity(const MacroState& state, const ModelParams& params,
                                       const Stencil& stencil) {
  return accumulate_sources(state, params, stencil, true, false).velocity;
}

std::vector<double> nonlocal_source_leadership(const MacroState& state, const ModelParams& params,
                                               const Stencil& stencil) {
  return accumulate_sources(state, params, stencil, false, true).leadership;
}

// ---------------------------------------------------------------------------
// Transport steps

bool cfl_check(const VelocityField& u, const Grid& grid, double dt, double u_bc) {
  double vmax = std::abs(u_bc);
  for (int d = 0; d < grid.dim; ++d)
    for (double v : u[d]) vmax = std::max(vmax, std::abs(v));
  const double hmin = grid.dim == 2 ? std::min(grid.dx[0], grid.dx[1]) : grid.dx[0];
  return dt * vmax <= hmin;
}

std::vector<double> step_density(const std::vector<double>& rho, const VelocityField& u,
                                 const Grid& grid, double dt, const BoundaryConditions& bc) {
  if (!cfl_check(u, grid, dt, bc.u))
    throw NumericalError("push-forward step refused: CFL condition violated (dt = " +
                         format_double(dt) + ")");
  const int n0 = grid.n[0], n1 = grid.n[1];
  const bool two_d = grid.dim == 2;
  // Padded layout with one ghost layer per active axis.
  const int p0 = n0 + 2;
  const int p1 = two_d ? n1 + 2 : 1;
  const int off1 = two_d ? 1 : 0;
  const std::size_t padded = static_cast<std::size_t>(p0) * p1;
  // Per padded source cell: mass times its share moving down (lo), staying
  // (mid) and moving up (hi) along axis 1, and the axis-2 shares. Shares are
  // Gamma / dx, so a cell at rest keeps its value bit for bit.
  std::vector<double> lo(padded), mid(padded), hi(padded), b_lo, b_mid, b_hi;
  if (two_d) {
    b_lo.resize(padded);
    b_mid.resize(padded);
    b_hi.resize(padded);
  }
  const double c1 = dt / grid.dx[0];
  const double c2 = dt / grid.dx[1];
  for (int s = 0; s < p1; ++s) {
    for (int r = 0; r < p0; ++r) {
      const int i = r - 1, j = s - off1;
      const bool inside = i >= 0 && i < n0 && j >= 0 && j < n1;
      const std::size_t q = static_cast<std::size_t>(s) * p0 + r;
      const std::size_t k = inside ? grid.index(i, j) : 0;
      const double m = inside ? rho[k] : bc.rho;
      const double a1 = (inside ? u[0][k] : bc.u) * c1;
      // Mass leaving towards i+1 is (X)^+, towards i-1 is (X)^-.
      hi[q] = m * std::max(a1, 0.0);
      lo[q] = m * std::max(-a1, 0.0);
      mid[q] = m * (1.0 - std::abs(a1));
      if (two_d) {
        const double a2 = (inside ? u[1][k] : bc.u) * c2;
        b_hi[q] = std::max(a2, 0.0);
        b_lo[q] = std::max(-a2, 0.0);
        b_mid[q] = 1.0 - std::abs(a2);
      }
    }
  }
  std::vector<double> out(grid.cells(), 0.0);
  if (!two_d) {
    for (int i = 0; i < n0; ++i) {
      const std::size_t q = static_cast<std::size_t>(i) + 1;
      out[i] = hi[q - 1] + mid[q] + lo[q + 1];
    }
    return out;
  }
  const std::size_t stride = static_cast<std::size_t>(p0);
  for (int j = 0; j < n1; ++j) {
    for (int i = 0; i < n0; ++i) {
      const std::size_t q = static_cast<std::size_t>(j + 1) * stride + i + 1;
      const std::size_t qd = q - stride, qu = q + stride;
      const double from_below = hi[qd - 1] * b_hi[qd - 1] + mid[qd] * b_hi[qd] + lo[qd + 1] * b_hi[qd + 1];
      const double from_row = hi[q - 1] * b_mid[q - 1] + mid[q] * b_mid[q] + lo[q + 1] * b_mid[q + 1];
      const double from_above = hi[qu - 1] * b_lo[qu - 1] + mid[qu] * b_lo[qu] + lo[qu + 1] * b_lo[qu + 1];
      out[grid.index(i, j)] = from_below + from_row + from_above;
    }
  }
  return out;
}

VelocityField step_momentum(const VelocityField& u, const VelocityField& source, const Grid& grid,
                            double dt, double D, MomentumMode mode, const BoundaryConditions& bc,
                            double linear_tol, int max_iter) {
  const int n0 = grid.n[0], n1 = grid.n[1];
  const bool two_d = grid.dim == 2;
  const int comps = grid.dim;
  const double c = diffusion_number(grid, D, dt);
  const double h1 = dt / (2.0 * grid.dx[0]);
  const double h2 = two_d ? dt / (2.0 * grid.dx[1]) : 0.0;
  VelocityField out{std::vector<double>(grid.cells(), 0.0), std::vector<double>(grid.cells(), 0.0)};

  if (mode == MomentumMode::explicit_euler) {
    for (int comp = 0; comp < comps; ++comp) {
      const Padded w{u[comp], grid, bc.u};
      for (int j = 0; j < n1; ++j) {
        for (int i = 0; i < n0; ++i) {
          const std::size_t k = grid.index(i, j);
          const double centre = u[comp][k];
          double next = centre - h1 * u[0][k] * (w(i + 1, j) - w(i - 1, j)) + dt * source[comp][k] +
                        c * (w(i - 1, j) - 2.0 * centre + w(i + 1, j));
          if (two_d) {
            next += -h2 * u[1][k] * (w(i, j + 1) - w(i, j - 1)) +
                    c * (w(i, j - 1) - 2.0 * centre + w(i, j + 1));
          }
          out[comp][k] = next;
        }
      }
    }
  } else if (!two_d) {
    // Tridiagonal: w_i + h a_i (w_{i+1} - w_{i-1}) - c (w_{i-1} - 2 w_i + w_{i+1}) = rhs.
    struct Row {
      double sub, diag, sup, rhs;
    };
    out[0] = solve_tridiagonal(grid.cells(), [&](std::size_t i) {
      if (on_ring(grid, static_cast<int>(i), 0)) return Row{0.0, 1.0, 0.0, bc.u};
      const double a = h1 * u[0][i];
      return Row{-a - c, 1.0 + 2.0 * c, a - c, u[0][i] + dt * source[0][i]};
    });
  } else {
    // The frozen advecting velocity gives both components the same matrix.
    using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
    const auto n = static_cast<Eigen::Index>(grid.cells());
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(n) * 5);
    for (int j = 0; j < n1; ++j) {
      for (int i = 0; i < n0; ++i) {
        const auto k = static_cast<Eigen::Index>(grid.index(i, j));
        if (on_ring(grid, i, j)) {
          entries.emplace_back(k, k, 1.0);
          continue;
        }
        const double a1 = h1 * u[0][k];
        const double a2 = h2 * u[1][k];
        entries.emplace_back(k, k, 1.0 + 4.0 * c);
        entries.emplace_back(k, static_cast<Eigen::Index>(grid.index(i - 1, j)), -a1 - c);
        entries.emplace_back(k, static_cast<Eigen::Index>(grid.index(i + 1, j)), a1 - c);
        entries.emplace_back(k, static_cast<Eigen::Index>(grid.index(i, j - 1)), -a2 - c);
        entries.emplace_back(k, static_cast<Eigen::Index>(grid.index(i, j + 1)), a2 - c);
      }
    }
    SpMat A(n, n);
    A.setFromTriplets(entries.begin(), entries.end());
    Eigen::BiCGSTAB<SpMat, Eigen::DiagonalPreconditioner<double>> solver;
    solver.setTolerance(linear_tol);
    solver.setMaxIterations(max_iter);
    solver.compute(A);
    for (int comp = 0; comp < 2; ++comp) {
      Eigen::VectorXd rhs(n), guess(n);
      for (int j = 0; j < n1; ++j) {
        for (int i = 0; i < n0; ++i) {
          const auto k = grid.index(i, j);
          rhs[static_cast<Eigen::Index>(k)] =
              on_ring(grid, i, j) ? bc.u : u[comp][k] + dt * source[comp][k];
          guess[static_cast<Eigen::Index>(k)] = u[comp][k];
        }
      }
      Eigen::VectorXd x = solver.solveWithGuess(rhs, guess);
      if (solver.info() != Eigen::Success) {
        throw NumericalError("implicit momentum solve did not converge: residual " +
                             format_double(solver.error()) + " after " +
                             std::to_string(solver.iterations()) + " iterations");
      }
      out[comp].assign(x.data(), x.data() + n);
    }
  }

  for (int comp = 0; comp < comps; ++comp)
    for (int j = 0; j < n1; ++j)
      for (int i = 0; i < n0; ++i)
        if (on_ring(grid, i, j)) out[comp][grid.index(i, j)] = bc.u;
  return out;
}

double bilinear_interpolate(const std::vector<double>& field, const Vec2& point, const Grid& grid,
                            double bc_value) {
  const double y = grid.dim == 1 ? 0.5 * grid.extent[1] : point[1];
  return interpolate(field.data(), grid, point[0], y, bc_value);
}

std::vector<double> step_leadership(const std::vector<double>& l, const VelocityField& u,
                                    const std::vector<double>& source, const Grid& grid, double dt,
                                    double l_bc) {
  std::vector<double> out(grid.cells());
  const bool two_d = grid.dim == 2;
  for (int j = 0; j < grid.n[1]; ++j) {
    const double y = two_d ? grid.x2(j) : 0.0;
    for (int i = 0; i < grid.n[0]; ++i) {
      const std::size_t k = grid.index(i, j);
      const double foot1 = grid.x1(i) - dt * u[0][k];
      const double foot2 = two_d ? y - dt * u[1][k] : 0.0;
      out[k] = interpolate(l.data(), grid, foot1, foot2, l_bc) + dt * source[k];
    }
  }
  return out;
}

void impose_boundary(MacroState& state, const BoundaryConditions& bc) {
  const Grid& g = state.grid;
  for (int j = 0; j < g.n[1]; ++j) {
    for (int i = 0; i < g.n[0]; ++i) {
      if (!on_ring(g, i, j)) continue;
      const std::size_t k = g.index(i, j);
      state.rho[k] = bc.rho;
      state.u[0][k] = bc.u;
      if (g.dim == 2) state.u[1][k] = bc.u;
      state.l[k] = bc.l;
    }
  }
}

// ---------------------------------------------------------------------------
// Orchestration

MacroStepper::MacroStepper(const Grid& grid, const ModelParams& p, const BoundaryConditions& b,
                           const SolverConfig& c)
    : params(p), bc(b), config(c), stencil(Stencil::build(grid, p.R)) {
  config.check();
}

MacroState MacroStepper::step(const MacroState& state) const {
  const Sources sources = accumulate_sources(state, params, stencil, true, true);
  const VelocityField& gu = sources.velocity;
  const std::vector<double>& gl = sources.leadership;
  MacroState next(state.grid, state.t + config.dt);
  next.rho = step_density(state.rho, state.u, state.grid, config.dt, bc);
  next.u = step_momentum(state.u, gu, state.grid, config.dt, config.D, config.momentum, bc,
                         config.linear_tol, config.max_iter);
  next.l = step_leadership(state.l, state.u, gl, state.grid, config.dt, bc.l);
  impose_boundary(next, bc);
  return next;
}

SnapshotSeries run_macro(const Scenario& scenario, const SolverConfig& config,
                         const MacroObserver& observer) {
  config.check();
  Scenario timing = scenario;
  timing.dt = config.dt;
  timing.T = config.T;
  const int steps = timing.steps();
  const std::vector<int> marks = timing.snapshot_steps();

  const MacroStepper stepper(scenario.grid, scenario.params, scenario.bc, config);
  MacroState state = scenario.initial_state();
  if (!state.all_finite()) throw NumericalError("run_macro: non-finite initial data");

  SnapshotSeries series;
  series.grid = scenario.grid;
  series.params = scenario.params;
  series.params.D = config.D;

  std::uint64_t l_violations = 0;
  double l_worst = 0.0;
  const double tol = config.l_monitor_tol;
  auto monitor = [&](const MacroState& s) {
    for (double v : s.l) {
      const double excess = std::max(-tol - v, v - 1.0 - tol);
      if (excess > 0.0) {
        ++l_violations;
        l_worst = std::max(l_worst, excess + tol);
      }
    }
  };

  std::size_t next_mark = 0;
  if (marks[next_mark] == 0) {
    series.snapshots.push_back({0, state});
    ++next_mark;
  }
  if (observer) observer(0, state);
  for (int step = 1; step <= steps; ++step) {
    try {
      state = stepper.step(state);
    } catch (const NumericalError& e) {
      throw NumericalError("step " + std::to_string(step) + ": " + e.what());
    }
    state.t = step * config.dt;
    if (!state.all_finite())
      throw NumericalError("run_macro: non-finite values at step " + std::to_string(step));
    monitor(state);
    if (observer) observer(step, state);
    if (next_mark < marks.size() && marks[next_mark] == step) {
      series.snapshots.push_back({step, state});
      ++next_mark;
    }
  }

  series.set_meta("scenario", scenario.name);
  series.set_meta("mode", "macro");
  series.set_meta("dt", format_double(config.dt));
  series.set_meta("T", format_double(config.T));
  series.set_meta("momentum", to_string(config.momentum));
  series.set_meta("linear_tol", format_double(config.linear_tol));
  series.set_meta("max_iter", std::to_string(config.max_iter));
  series.set_meta("rho_bc", format_double(scenario.bc.rho));
  series.set_meta("u_bc", format_double(scenario.bc.u));
  series.set_meta("l_bc", format_double(scenario.bc.l));
  series.set_meta("stencil_cells", std::to_string(stepper.stencil.offsets.size()));
  series.set_meta("l_range_violations", std::to_string(l_violations));
  series.set_meta("l_range_worst", format_double(l_worst));
  series.set_meta("code_version", kCodeVersion);
  return series;
}

}  // namespace swarm
