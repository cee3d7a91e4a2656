#include "swarm/micro.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

#include "swarm/config.hpp"

namespace swarm {

namespace {

constexpr double kCoincidentGuard = 1e-12;

Agent agent_at(const Ensemble& ens, std::size_t i) {
  Agent a;
  for (int d = 0; d < ens.dim; ++d) {
    a.x[d] = ens.x[i * ens.dim + d];
    a.v[d] = ens.v[i * ens.dim + d];
  }
  a.lambda = ens.lambda[i];
  return a;
}

double clamp_unit(double value, MicroCounters& counters) {
  if (value < 0.0) {
    ++counters.clamped;
    return 0.0;
  }
  if (value > 1.0) {
    ++counters.clamped;
    return 1.0;
  }
  return value;
}

// Bernoulli(p) that consumes a uniform draw only when 0 < p < 1.
bool gate(double p, std::mt19937_64& rng) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return std::generate_canonical<double, 53>(rng) < p;
}

}  // namespace

LeadershipRule parse_leadership_rule(const std::string& name) {
  if (name == "binary") return LeadershipRule::binary;
  if (name == "generalized") return LeadershipRule::generalized;
  throw ConfigError("unknown leadership rule '" + name + "' (valid: binary, generalized)");
}

const char* to_string(LeadershipRule rule) {
  return rule == LeadershipRule::binary ? "binary" : "generalized";
}

void Ensemble::add(const Vec2& pos, const Vec2& vel, double lam) {
  for (int d = 0; d < dim; ++d) {
    x.push_back(pos[d]);
    v.push_back(vel[d]);
  }
  lambda.push_back(lam);
  initial_count = lambda.size();
}

Vec2 velocity_update(const Agent& self, const Agent& other, double alpha, double beta,
                     double gamma, int dim, bool* coincident) {
  Vec2 diff{0.0, 0.0};  // x - x*
  double r2 = 0.0;
  for (int d = 0; d < dim; ++d) {
    diff[d] = self.x[d] - other.x[d];
    r2 += diff[d] * diff[d];
  }
  const bool too_close = std::sqrt(r2) < kCoincidentGuard;
  if (coincident) *coincident = too_close;
  const double follow = 1.0 - self.lambda;
  Vec2 out = self.v;
  for (int d = 0; d < dim; ++d) {
    const double repulsion = too_close ? 0.0 : alpha * diff[d] / r2;
    out[d] += repulsion + follow * (beta * (other.v[d] - self.v[d]) + gamma * (-diff[d]));
  }
  return out;
}

double leadership_update(double lambda, double lambda_star, LeadershipRule rule, double nu,
                         double delta) {
  if (rule == LeadershipRule::binary) return 1.0 - lambda;
  return lambda + nu * (lambda_star - lambda) +
         delta * (1.0 - 2.0 * lambda + nu * (lambda - lambda_star));
}

std::pair<Vec2, Vec2> conservative_velocity_core(const Vec2& v, const Vec2& v_star, double lambda,
                                                 double lambda_star, double beta) {
  const double weight = (1.0 - 0.5 * (lambda + lambda_star)) * beta;
  Vec2 a = v, b = v_star;
  for (int d = 0; d < 2; ++d) {
    a[d] += weight * (v_star[d] - v[d]);
    b[d] += weight * (v[d] - v_star[d]);
  }
  return {a, b};
}

std::pair<double, double> conservative_leadership_core(double lambda, double lambda_star,
                                                       double nu) {
  return {lambda + nu * (lambda_star - lambda), lambda_star + nu * (lambda - lambda_star)};
}

void apply_pair_event(Ensemble& ens, std::size_t i, std::size_t j, bool theta, bool sigma,
                      const EffectiveParams& params, LeadershipRule rule) {
  if (!theta && !sigma) return;
  const Agent a = agent_at(ens, i);
  const Agent b = agent_at(ens, j);
  const int dim = ens.dim;
  if (theta) {
    bool close_a = false, close_b = false;
    const Vec2 va = velocity_update(a, b, params.alpha(), params.beta(), params.gamma(), dim, &close_a);
    const Vec2 vb = velocity_update(b, a, params.alpha(), params.beta(), params.gamma(), dim, &close_b);
    for (int d = 0; d < dim; ++d) {
      ens.v[i * dim + d] = va[d];
      ens.v[j * dim + d] = vb[d];
    }
    ++ens.counters.velocity_events;
    if (close_a || close_b) ++ens.counters.coincident;
  }
  if (sigma) {
    const double la = leadership_update(a.lambda, b.lambda, rule, params.nu(), params.delta());
    const double lb = leadership_update(b.lambda, a.lambda, rule, params.nu(), params.delta());
    ens.lambda[i] = clamp_unit(la, ens.counters);
    ens.lambda[j] = clamp_unit(lb, ens.counters);
    ++ens.counters.leadership_events;
  }
}

Ensemble init_ensemble(const Scenario& scenario, std::size_t N, std::uint64_t seed) {
  const Grid& grid = scenario.grid;
  if (grid.dim != 1) throw ConfigError("init_ensemble: particle runs are 1D only");
  if (N < 2) throw ConfigError("init_ensemble: need N >= 2");

  // Tabulated CDF of the initial density on a grid four times finer than the
  // scenario grid (at least 2^16 intervals), trapezoidal rule.
  const double length = grid.extent[0];
  const std::size_t intervals = std::max<std::size_t>(std::size_t{1} << 16, 4 * grid.cells());
  const double h = length / static_cast<double>(intervals);
  std::vector<double> density(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k) {
    const double value = scenario.rho0({static_cast<double>(k) * h, 0.0});
    if (!std::isfinite(value) || value < 0.0)
      throw ConfigError("init_ensemble: initial density is negative or non-finite at x = " +
                        format_double(static_cast<double>(k) * h));
    density[k] = value;
  }
  std::vector<double> cdf(intervals + 1, 0.0);
  for (std::size_t k = 1; k <= intervals; ++k) cdf[k] = cdf[k - 1] + 0.5 * h * (density[k - 1] + density[k]);
  const double mass = cdf.back();
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw ConfigError("init_ensemble: initial density is not normalizable");

  Ensemble ens;
  ens.dim = 1;
  ens.rng.seed(seed);
  ens.x.reserve(N);
  ens.v.reserve(N);
  ens.lambda.reserve(N);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (std::size_t p = 0; p < N; ++p) {
    const double target = uniform(ens.rng) * mass;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    std::size_t k = static_cast<std::size_t>(std::distance(cdf.begin(), it));
    k = std::clamp<std::size_t>(k, 1, intervals);
    const double lo = cdf[k - 1], hi = cdf[k];
    const double frac = hi > lo ? (target - lo) / (hi - lo) : 0.5;
    const double pos = (static_cast<double>(k - 1) + frac) * h;
    const Vec2 at{pos, 0.0};
    const double lam = scenario.l0(at);
    if (!(lam >= 0.0 && lam <= 1.0))
      throw ConfigError("init_ensemble: initial leadership outside [0, 1]");
    ens.add(at, scenario.u0(at), lam);
  }
  ens.initial_count = N;
  return ens;
}

void drift_step(Ensemble& ens, double dt) {
  const std::size_t n = ens.x.size();
  double* x = ens.x.data();
  const double* v = ens.v.data();
  for (std::size_t k = 0; k < n; ++k) x[k] += v[k] * dt;
}

void interaction_step(Ensemble& ens, const EffectiveParams& params, double dt,
                      LeadershipRule rule) {
  const std::size_t n = ens.size();
  if (n < 2) return;
  if (ens.order.size() != n) {
    ens.order.resize(n);
    std::iota(ens.order.begin(), ens.order.end(), 0u);
  }
  std::shuffle(ens.order.begin(), ens.order.end(), ens.rng);

  const double R = params.kernel().radius;
  const double mu_dt = params.mu() * dt;
  const double eta_dt = params.eta() * dt;
  const int dim = ens.dim;
  const double* x = ens.x.data();
  for (std::size_t p = 0; p + 1 < n; p += 2) {
    const std::size_t i = ens.order[p];
    const std::size_t j = ens.order[p + 1];
    double r2 = 0.0;
    for (int d = 0; d < dim; ++d) {
      const double diff = x[i * dim + d] - x[j * dim + d];
      r2 += diff * diff;
    }
    if (r2 > R * R) continue;  // B = 0 outside the closed ball
    // B = 1 inside, so the gate probabilities are the rates times dt.
    const bool theta = gate(mu_dt, ens.rng);
    const bool sigma = gate(eta_dt, ens.rng);
    apply_pair_event(ens, i, j, theta, sigma, params, rule);
  }
}

std::size_t remove_outside(Ensemble& ens, const Grid& grid) {
  const int dim = ens.dim;
  const std::size_t n = ens.size();
  auto inside = [&](std::size_t p) {
    Vec2 pos{0.0, 0.0};
    for (int d = 0; d < dim; ++d) pos[d] = ens.x[p * dim + d];
    return grid.contains(pos);
  };
  // Most steps lose nobody: find the first leaver before touching memory.
  std::size_t first = 0;
  if (dim == 1) {
    const double* x = ens.x.data();
    const double hi = grid.extent[0];
    while (first < n && !(x[first] < 0.0 || x[first] > hi)) ++first;
  } else {
    while (first < n && inside(first)) ++first;
  }
  if (first == n) return 0;

  std::size_t kept = first;
  for (std::size_t p = first + 1; p < n; ++p) {
    if (!inside(p)) continue;
    for (int d = 0; d < dim; ++d) {
      ens.x[kept * dim + d] = ens.x[p * dim + d];
      ens.v[kept * dim + d] = ens.v[p * dim + d];
    }
    ens.lambda[kept] = ens.lambda[p];
    ++kept;
  }
  const std::size_t removed = n - kept;
  ens.x.resize(kept * dim);
  ens.v.resize(kept * dim);
  ens.lambda.resize(kept);
  ens.counters.removed += removed;
  return removed;
}

MacroState moments_on_grid(const Ensemble& ens, const Grid& grid, double t,
                           std::uint64_t* outside) {
  if (ens.dim != grid.dim) throw ConfigError("moments_on_grid: ensemble and grid dimensions differ");
  MacroState state(grid, t);
  std::vector<double> count(grid.cells(), 0.0);
  std::uint64_t stray = 0;
  const int dim = ens.dim;
  for (std::size_t p = 0; p < ens.size(); ++p) {
    std::array<int, 2> cell{0, 0};
    bool out = false;
    for (int d = 0; d < dim; ++d) {
      const double pos = ens.x[p * dim + d];
      if (pos < 0.0 || pos > grid.extent[d]) out = true;
      const double f = std::floor(pos / grid.dx[d]);
      const double clamped = std::clamp(f, 0.0, static_cast<double>(grid.n[d] - 1));
      cell[d] = static_cast<int>(clamped);
    }
    if (out) ++stray;
    const std::size_t k = grid.index(cell[0], cell[1]);
    count[k] += 1.0;
    for (int d = 0; d < dim; ++d) state.u[d][k] += ens.v[p * dim + d];
    state.l[k] += ens.lambda[p];
  }
  const double norm = static_cast<double>(ens.initial_count) * grid.cell_area();
  for (std::size_t k = 0; k < grid.cells(); ++k) {
    if (count[k] == 0.0) continue;
    state.rho[k] = count[k] / norm;
    for (int d = 0; d < dim; ++d) state.u[d][k] /= count[k];
    state.l[k] /= count[k];
  }
  if (outside) *outside = stray;
  return state;
}

double consistency_bound(const EffectiveParams& params) {
  const double rate = std::max(params.mu(), params.eta()) * params.kernel().sup();
  return rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
}

SnapshotSeries run_micro(const Scenario& scenario, const MicroConfig& config,
                         const EnsembleObserver& observer) {
  for (const auto& w : validate(scenario.params)) std::clog << "warning: " << w << '\n';
  EffectiveParams params = apply_scaling(scenario.params);
  if (!config.interactions) params = params.without_interactions();
  if (config.dt > consistency_bound(params) * (1.0 + 1e-12))
    throw ConfigError("run_micro: dt = " + format_double(config.dt) +
                      " exceeds the consistency bound " + format_double(consistency_bound(params)));

  Scenario timing = scenario;
  timing.dt = config.dt;
  timing.T = config.T;
  const int steps = timing.steps();
  const std::vector<int> marks = timing.snapshot_steps();

  Ensemble ens = init_ensemble(scenario, config.N, config.seed);
  SnapshotSeries series;
  series.grid = scenario.grid;
  series.params = scenario.params;

  auto snap = [&](int step) {
    std::uint64_t stray = 0;
    series.snapshots.push_back({step, moments_on_grid(ens, scenario.grid, step * config.dt, &stray)});
    ens.counters.outside_binned += stray;
  };

  std::size_t next_mark = 0;
  if (marks[next_mark] == 0) {
    snap(0);
    ++next_mark;
  }
  if (observer) observer(0, ens);
  for (int step = 1; step <= steps; ++step) {
    drift_step(ens, config.dt);
    remove_outside(ens, scenario.grid);
    interaction_step(ens, params, config.dt, config.rule);
    if (observer) observer(step, ens);
    if (next_mark < marks.size() && marks[next_mark] == step) {
      snap(step);
      ++next_mark;
    }
  }

  series.set_meta("scenario", scenario.name);
  series.set_meta("mode", "micro");
  series.set_meta("N", std::to_string(config.N));
  series.set_meta("seed", std::to_string(config.seed));
  series.set_meta("dt", format_double(config.dt));
  series.set_meta("T", format_double(config.T));
  series.set_meta("rule", to_string(config.rule));
  series.set_meta("interactions", config.interactions ? "on" : "off");
  series.set_meta("rho_bc", format_double(scenario.bc.rho));
  series.set_meta("u_bc", format_double(scenario.bc.u));
  series.set_meta("l_bc", format_double(scenario.bc.l));
  series.set_meta("coincident_pairs", std::to_string(ens.counters.coincident));
  series.set_meta("clamped_leadership", std::to_string(ens.counters.clamped));
  series.set_meta("removed_particles", std::to_string(ens.counters.removed));
  series.set_meta("outside_binned", std::to_string(ens.counters.outside_binned));
  series.set_meta("code_version", kCodeVersion);
  return series;
}

}  // namespace swarm
