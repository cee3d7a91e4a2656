// Acceptance runner: one PASS/FAIL line per criterion on stdout, supporting
// numbers on stderr. Usage: swarm_acceptance [criterion ...] (default: all).

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "swarm/comparison.hpp"
#include "swarm/config.hpp"
#include "swarm/macro.hpp"
#include "swarm/metrics.hpp"
#include "swarm/micro.hpp"
#include "swarm/scenario.hpp"

using namespace swarm;

namespace {

// ---------------------------------------------------------------------------
// Pinned tolerances and protocol sizes.

constexpr std::size_t kComparisonN = 100000;
constexpr double kComparisonT = 5.0;
constexpr int kComparisonSeeds = 5;
constexpr double kReferenceRhoU = 0.0011;
constexpr double kReferenceRhoL = 0.0675;
constexpr double kReferenceFactor = 3.0;
constexpr double kComparisonBudgetSeconds = 15 * 60;

constexpr int kCoreSamples = 1000000;
constexpr double kCoreTolerance = 1e-12;
constexpr int kSchemeTrials = 1000;
constexpr double kMassTolerance = 1e-12;

constexpr int kFixedPointSteps = 100;
constexpr double kFixedPointTolerance = 1e-10;

constexpr double kHalfShiftTolerance = 1e-14;
constexpr double kAffineTolerance = 1e-13;
constexpr double kRatioLow = 1.7;
constexpr double kRatioHigh = 2.3;

constexpr double kPatternDx = 0.02;
constexpr double kMergeDeadline = 180.0;
constexpr double kRingTime = 100.0;
constexpr double kDiameterGap = 0.10;
constexpr double kPatternBudgetSeconds = 30 * 60;

constexpr double kSlopeLow = -0.65;
constexpr double kSlopeHigh = -0.35;

struct Verdict {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

VelocityField zeros(const Grid& g) {
  return {std::vector<double>(g.cells(), 0.0), std::vector<double>(g.cells(), 0.0)};
}

// ---------------------------------------------------------------------------
// 1. Particle vs continuum distances on the 1D test.

Verdict comparison_trend() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> radii{0.02, 0.01};
  const std::vector<double> epsilons{1e-3, 1e-4};
  ComparisonConfig config;
  config.T = kComparisonT;
  ComparisonRunner runner(config);

  // mean[(R, eps)] = {rho, rho u, rho l}
  std::map<std::pair<double, double>, std::array<double, 3>> mean;
  for (double R : radii) {
    for (double eps : epsilons) {
      std::array<double, 3> sum{0, 0, 0};
      for (int seed = 1; seed <= kComparisonSeeds; ++seed) {
        const ComparisonRow row = runner.run(R, eps, kComparisonN, seed);
        std::cerr << format_comparison_row(row) << '\n';
        sum[0] += row.l2_rho;
        sum[1] += row.l2_rhou;
        sum[2] += row.l2_rhol;
      }
      for (double& s : sum) s /= kComparisonSeeds;
      mean[{R, eps}] = sum;
      std::cerr << "mean R=" << R << " eps=" << eps << ": rho " << num(sum[0]) << " rhou " << num(sum[1])
                << " rhol " << num(sum[2]) << '\n';
    }
  }

  Verdict v;
  const char* names[3] = {"rho", "rhou", "rhol"};
  for (double R : radii) {
    for (int m = 0; m < 3; ++m) {
      const double coarse = mean[{R, 1e-3}][m], fine = mean[{R, 1e-4}][m];
      if (!(fine < coarse)) {
        v.pass = false;
        v.detail += std::string(" (a) ") + names[m] + "@R=" + num(R) + " not decreasing (" + num(coarse) +
                    " -> " + num(fine) + ");";
      }
    }
  }
  const auto& target = mean[{0.01, 1e-4}];
  auto within = [](double value, double ref) {
    return value >= ref / kReferenceFactor && value <= ref * kReferenceFactor;
  };
  if (!within(target[1], kReferenceRhoU)) {
    v.pass = false;
    v.detail += " (b) rhou=" + num(target[1]) + " outside [" + num(kReferenceRhoU / kReferenceFactor) + ", " +
                num(kReferenceRhoU * kReferenceFactor) + "];";
  }
  if (!within(target[2], kReferenceRhoL)) {
    v.pass = false;
    v.detail += " (b) rhol=" + num(target[2]) + " outside [" + num(kReferenceRhoL / kReferenceFactor) + ", " +
                num(kReferenceRhoL * kReferenceFactor) + "];";
  }
  const double elapsed = seconds_since(t0);
  if (elapsed > kComparisonBudgetSeconds) {
    v.pass = false;
    v.detail += " runtime " + num(elapsed) + "s over budget;";
  }
  v.detail += " rho/rhou/rhol at (1e-4, 0.01) = " + num(target[0]) + "/" + num(target[1]) + "/" +
              num(target[2]) + ", " + num(elapsed) + "s";
  return v;
}

// ---------------------------------------------------------------------------
// 2. Conservation.

Verdict conservation() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> V(-10.0, 10.0), L(0.0, 1.0);
  double worst_v = 0.0, worst_l = 0.0;
  for (int t = 0; t < kCoreSamples; ++t) {
    const Vec2 v{V(rng), V(rng)}, w{V(rng), V(rng)};
    const auto [a, b] = conservative_velocity_core(v, w, L(rng), L(rng), L(rng));
    for (int d = 0; d < 2; ++d) worst_v = std::max(worst_v, std::abs((a[d] + b[d]) - (v[d] + w[d])));
    const double l = L(rng), ls = L(rng);
    const auto [m, n] = conservative_leadership_core(l, ls, L(rng));
    worst_l = std::max(worst_l, std::abs((m + n) - (l + ls)));
  }

  double worst_mass = 0.0;
  std::uniform_real_distribution<double> U(0.0, 1.0), S(-1.0, 1.0);
  for (int t = 0; t < kSchemeTrials; ++t) {
    const Grid g = t % 2 ? Grid::make_2d(1.0, 1.5, 24, 36) : Grid::make_1d(2.0, 96);
    const double umax = 0.1 + 2.0 * U(rng);
    const double dt = U(rng) * std::min(g.dx[0], g.dim == 2 ? g.dx[1] : g.dx[0]) / umax;
    std::vector<double> rho(g.cells(), 0.0);
    VelocityField u = zeros(g);
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i) {
        const std::size_t k = g.index(i, j);
        const bool interior = i >= 2 && i < g.n[0] - 2 && (g.dim == 1 || (j >= 2 && j < g.n[1] - 2));
        rho[k] = interior ? U(rng) : 0.0;
        u[0][k] = umax * S(rng);
        if (g.dim == 2) u[1][k] = umax * S(rng);
      }
    const std::vector<double> out = step_density(rho, u, g, dt);
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t k = 0; k < g.cells(); ++k) {
      m0 += rho[k];
      m1 += out[k];
    }
    worst_mass = std::max(worst_mass, std::abs(m1 - m0) / m0);
  }

  Verdict v;
  v.pass = worst_v <= kCoreTolerance && worst_l <= kCoreTolerance && worst_mass <= kMassTolerance;
  v.detail = "velocity core " + num(worst_v) + ", leadership core " + num(worst_l) + ", push-forward mass " +
             num(worst_mass);
  return v;
}

// ---------------------------------------------------------------------------
// 3. Positivity and range.

Verdict positivity_range() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> U(0.0, 1.0), S(-1.0, 1.0);

  double min_rho = 0.0;
  for (int t = 0; t < kSchemeTrials; ++t) {
    const Grid g = t % 2 ? Grid::make_2d(1.0, 1.0, 20, 20) : Grid::make_1d(1.0, 80);
    const double umax = 0.1 + 2.0 * U(rng);
    const double dt = U(rng) * g.dx[0] / umax;
    std::vector<double> rho(g.cells());
    VelocityField u = zeros(g);
    for (std::size_t k = 0; k < g.cells(); ++k) {
      rho[k] = U(rng) < 0.3 ? 0.0 : U(rng);
      u[0][k] = umax * S(rng);
      if (g.dim == 2) u[1][k] = umax * S(rng);
    }
    BoundaryConditions bc;
    bc.rho = U(rng) < 0.5 ? 0.0 : U(rng);
    bc.u = umax * S(rng);
    for (double r : step_density(rho, u, g, dt, bc)) min_rho = std::min(min_rho, r);
  }

  double max_excess = 0.0;
  for (int t = 0; t < kSchemeTrials; ++t) {
    const Grid g = t % 2 ? Grid::make_2d(1.0, 1.0, 20, 20) : Grid::make_1d(1.0, 80);
    std::vector<double> l(g.cells());
    VelocityField u = zeros(g);
    const double speed = 3.0 * U(rng);
    for (std::size_t k = 0; k < g.cells(); ++k) {
      l[k] = U(rng);
      u[0][k] = speed * S(rng);
      if (g.dim == 2) u[1][k] = speed * S(rng);
    }
    const double l_bc = U(rng);
    const double dt = 0.2 * U(rng);
    const std::vector<double> out = step_leadership(l, u, std::vector<double>(g.cells(), 0.0), g, dt, l_bc);
    const double lo = std::min(l_bc, *std::min_element(l.begin(), l.end()));
    const double hi = std::max(l_bc, *std::max_element(l.begin(), l.end()));
    for (double x : out) max_excess = std::max({max_excess, lo - x, x - hi});
  }

  // Full 1D comparison run at the default settings.
  const Scenario s = make_test1d(0.02, 1e-3);
  MicroConfig c;
  c.N = kComparisonN;
  c.dt = s.dt;
  c.T = s.T;
  c.seed = 1;
  std::size_t outside = 0;
  int steps_seen = 0;
  run_micro(s, c, [&](int, const Ensemble& e) {
    ++steps_seen;
    for (double x : e.lambda) outside += (x >= 0.0 && x <= 1.0) ? 0 : 1;
  });

  Verdict v;
  v.pass = min_rho >= 0.0 && max_excess <= 0.0 && outside == 0 && steps_seen == s.steps() + 1;
  v.detail = "min rho " + num(min_rho) + ", max-principle excess " + num(max_excess) + ", leadership outside [0,1] " +
             std::to_string(outside) + " over " + std::to_string(steps_seen) + " observed steps";
  return v;
}

// ---------------------------------------------------------------------------
// 4. Fixed points.

double max_change(const MacroState& a, const MacroState& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.rho.size(); ++k) {
    worst = std::max(worst, std::abs(a.rho[k] - b.rho[k]));
    worst = std::max(worst, std::abs(a.u[0][k] - b.u[0][k]));
    worst = std::max(worst, std::abs(a.u[1][k] - b.u[1][k]));
    worst = std::max(worst, std::abs(a.l[k] - b.l[k]));
  }
  return worst;
}

Verdict fixed_points() {
  double worst_step = 0.0;
  for (int dim : {1, 2}) {
    const Grid g = dim == 1 ? Grid::make_1d(2.0, 200) : Grid::make_2d(1.0, 1.0, 50, 50);
    const Vec2 centre{0.5 * g.extent[0], dim == 2 ? 0.5 : 0.0};
    ModelParams p;
    p.alpha0 = 0.0;
    p.gamma0 = 0.0;
    p.beta0 = 0.7;
    p.nu = 0.3;
    p.mu = 1.5;
    p.eta = 0.8;
    p.R = 0.2;
    BoundaryConditions bc;
    bc.l = 0.5;
    SolverConfig c;
    c.dt = 0.1;
    c.D = 1e-3;
    MacroState s(g);
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i) {
        const Vec2 x = g.center(i, j);
        const double r2 = (x[0] - centre[0]) * (x[0] - centre[0]) + (x[1] - centre[1]) * (x[1] - centre[1]);
        // Compact cosine bump, zero well inside the boundary ring.
        s.rho[g.index(i, j)] = r2 < 0.09 ? 0.5 * (1.0 + std::cos(std::numbers::pi * std::sqrt(r2) / 0.3)) : 0.0;
        s.l[g.index(i, j)] = 0.5;
      }
    const MacroStepper stepper(g, p, bc, c);
    for (int n = 0; n < kFixedPointSteps; ++n) {
      MacroState next = stepper.step(s);
      worst_step = std::max(worst_step, max_change(s, next));
      s = std::move(next);
    }
  }

  // Full leaders: the attraction term contributes nothing, bit for bit.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0), S(-1.0, 1.0);
  bool identical = true;
  for (int t = 0; t < 20; ++t) {
    const Grid g = t % 2 ? Grid::make_2d(1.0, 1.0, 30, 30) : Grid::make_1d(1.0, 120);
    MacroState s(g);
    for (std::size_t k = 0; k < g.cells(); ++k) {
      s.rho[k] = U(rng);
      s.u[0][k] = S(rng);
      if (g.dim == 2) s.u[1][k] = S(rng);
      s.l[k] = 1.0;
    }
    ModelParams with;
    with.alpha0 = 0.02;
    with.gamma0 = 0.5 + U(rng);
    with.R = 0.1;
    ModelParams without = with;
    without.gamma0 = 0.0;
    const Stencil st = Stencil::build(g, with.R);
    const VelocityField a = nonlocal_source_velocity(s, with, st);
    const VelocityField b = nonlocal_source_velocity(s, without, st);
    identical = identical && a[0] == b[0] && a[1] == b[1];
  }

  Verdict v;
  v.pass = worst_step <= kFixedPointTolerance && identical;
  v.detail = "largest per-step change " + num(worst_step) + ", full-leader attraction " +
             (identical ? "vanishes exactly" : "leaks");
  return v;
}

// ---------------------------------------------------------------------------
// 5. Scheme oracles.

double mode_gap(const Grid& g, const VelocityField& u0, const VelocityField& src, double D, double T, int steps) {
  const double dt = T / steps;
  VelocityField ue = u0, ui = u0;
  for (int n = 0; n < steps; ++n) {
    ue = step_momentum(ue, src, g, dt, D, MomentumMode::explicit_euler, {}, 1e-13, 10000);
    ui = step_momentum(ui, src, g, dt, D, MomentumMode::implicit_euler, {}, 1e-13, 10000);
  }
  double sum = 0.0;
  for (int c = 0; c < g.dim; ++c)
    for (std::size_t k = 0; k < g.cells(); ++k) sum += (ue[c][k] - ui[c][k]) * (ue[c][k] - ui[c][k]);
  return std::sqrt(sum * g.cell_area());
}

Verdict scheme_oracles() {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> U(0.0, 1.0), S(-1.0, 1.0);

  // Half-cell shift along axis 1.
  double shift_err = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Grid g = t % 2 ? Grid::make_2d(1.0, 1.0, 25, 25) : Grid::make_1d(1.0, 50);
    const double dt = 0.01 + 0.1 * U(rng);
    std::vector<double> rho(g.cells());
    for (double& r : rho) r = U(rng);
    VelocityField u = zeros(g);
    std::fill(u[0].begin(), u[0].end(), g.dx[0] / (2.0 * dt));
    const std::vector<double> out = step_density(rho, u, g, dt);
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 1; i < g.n[0]; ++i)
        shift_err = std::max(shift_err, std::abs(out[g.index(i, j)] -
                                                 0.5 * (rho[g.index(i, j)] + rho[g.index(i - 1, j)])));
  }

  // Affine fields between interior centres.
  double affine_err = 0.0;
  for (int t = 0; t < kSchemeTrials; ++t) {
    const Grid g = t % 2 ? Grid::make_2d(1.3, 0.7, 26, 14) : Grid::make_1d(1.3, 26);
    const double a = S(rng), b = S(rng), c = S(rng);
    std::vector<double> f(g.cells());
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i) f[g.index(i, j)] = a + b * g.x1(i) + c * g.x2(j);
    const double x = g.x1(0) + U(rng) * (g.x1(g.n[0] - 1) - g.x1(0));
    const double y = g.dim == 2 ? g.x2(0) + U(rng) * (g.x2(g.n[1] - 1) - g.x2(0)) : 0.0;
    affine_err = std::max(affine_err, std::abs(bilinear_interpolate(f, {x, y}, g, 0.0) - (a + b * x + c * y)));
  }

  // Implicit against explicit momentum on smooth data: the gap is O(dt).
  const Grid g = Grid::make_2d(1.0, 1.0, 40, 40);
  VelocityField u0 = zeros(g), src = zeros(g);
  for (int j = 0; j < g.n[1]; ++j)
    for (int i = 0; i < g.n[0]; ++i) {
      const Vec2 x = g.center(i, j);
      const double bump = std::exp(-((x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5)) / 0.02);
      const std::size_t k = g.index(i, j);
      u0[0][k] = 0.3 * bump;
      u0[1][k] = -0.2 * bump;
      src[0][k] = 0.1 * bump * std::sin(2 * std::numbers::pi * x[1]);
      src[1][k] = 0.1 * bump * std::cos(2 * std::numbers::pi * x[0]);
    }
  const double T = 0.2, D = 1e-3;
  const double g1 = mode_gap(g, u0, src, D, T, 10);
  const double g2 = mode_gap(g, u0, src, D, T, 20);
  const double g4 = mode_gap(g, u0, src, D, T, 40);
  const double r1 = g1 / g2, r2 = g2 / g4;

  Verdict v;
  v.pass = shift_err <= kHalfShiftTolerance && affine_err <= kAffineTolerance && r1 >= kRatioLow &&
           r1 <= kRatioHigh && r2 >= kRatioLow && r2 <= kRatioHigh;
  v.detail = "half-shift " + num(shift_err) + ", affine " + num(affine_err) + ", self-convergence ratios " +
             num(r1) + " and " + num(r2);
  return v;
}

// ---------------------------------------------------------------------------
// 6. Two-dimensional patterns on a coarser grid.

Scenario coarse(const std::string& name) {
  Scenario s = build_scenario(name);
  const int cells = static_cast<int>(std::lround(s.grid.extent[0] / kPatternDx));
  s.grid = Grid::make_2d(s.grid.extent[0], s.grid.extent[1], cells, cells);
  s.snapshot_count = 0;
  return s;
}

Verdict patterns_2d() {
  Verdict v;
  double slowest = 0.0;
  auto timed = [&](auto&& run) {
    const auto t0 = std::chrono::steady_clock::now();
    auto result = run();
    slowest = std::max(slowest, seconds_since(t0));
    return result;
  };

  // Merge of the two groups.
  const Scenario b = coarse("test2db");
  int initial_count = -1;
  double merge_time = -1.0;
  const SnapshotSeries sb = timed([&] {
    return run_macro(b, solver_defaults(b), [&](int step, const MacroState& s) {
      if (merge_time >= 0.0 || step % 5 != 0) return;
      const int count = pattern_metrics(s.rho, s.grid).local_max_count;
      if (step == 0) initial_count = count;
      else if (count == 1) merge_time = s.t;
    });
  });
  const bool merged = initial_count == 2 && merge_time >= 0.0 && merge_time < kMergeDeadline;
  std::cerr << "test2db: initial maxima " << initial_count << ", single maximum from t=" << merge_time << '\n';

  // Boundary leadership changes the final extent.
  const Scenario b1 = coarse("test2db_lbc1");
  const SnapshotSeries sb1 = timed([&] { return run_macro(b1, solver_defaults(b1)); });
  const double d0 = pattern_metrics(sb.final_state().rho, b.grid).support_diameter;
  const double d1 = pattern_metrics(sb1.final_state().rho, b1.grid).support_diameter;
  const double gap = std::abs(d0 - d1) / std::max(d0, d1);
  std::cerr << "support diameters: l_bc=0 " << d0 << ", l_bc=1 " << d1 << '\n';

  // Ring at t = 100.
  Scenario c = coarse("test2dc");
  c.T = kRingTime;
  const SnapshotSeries sc = timed([&] { return run_macro(c, solver_defaults(c)); });
  const PatternMetrics ring = pattern_metrics(sc.final_state().rho, c.grid);
  std::cerr << "test2dc: profile peak " << ring.profile_peak_radius() << ", support radius " << ring.support_radius
            << '\n';

  v.pass = merged && gap >= kDiameterGap && ring.ring_present() && slowest <= kPatternBudgetSeconds;
  v.detail = "merge " + std::string(merged ? "at t=" + num(merge_time) : "missing") + ", diameter gap " +
             num(100 * gap) + "%, ring peak/support " + num(ring.profile_peak_radius() / ring.support_radius) +
             ", slowest run " + num(slowest) + "s";
  return v;
}

// ---------------------------------------------------------------------------
// 7. Monte Carlo rate.

Verdict monte_carlo_rate() {
  const double drift = 0.5, T = 2.0;
  Scenario s = make_test1d(0.02, 1e-3);
  s.u0 = [=](const Vec2&) { return Vec2{drift, 0.0}; };
  s.snapshot_count = 0;
  const Grid& g = s.grid;
  std::vector<double> exact(g.cells());
  for (int i = 0; i < g.n[0]; ++i)
    exact[i] = oracle::gaussian_cell_mean(i * g.dx[0], (i + 1) * g.dx[0], 25.0 + drift * T, 5.0);

  const std::vector<double> sizes{1e3, 1e4, 1e5};
  std::vector<double> errors;
  for (double N : sizes) {
    double sum = 0.0;
    const int seeds = 8;
    for (int seed = 1; seed <= seeds; ++seed) {
      MicroConfig c;
      c.N = static_cast<std::size_t>(N);
      c.dt = 0.01;
      c.T = T;
      c.seed = seed;
      c.interactions = false;
      sum += l2_distance(run_micro(s, c).final_state().rho, exact, g);
    }
    errors.push_back(sum / seeds);
  }
  const double slope = oracle::loglog_slope(sizes, errors);

  Verdict v;
  v.pass = slope >= kSlopeLow && slope <= kSlopeHigh;
  v.detail = "L2 errors " + num(errors[0]) + ", " + num(errors[1]) + ", " + num(errors[2]) + "; slope " + num(slope);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"comparison_trend", comparison_trend}, {"conservation", conservation},
      {"positivity_range", positivity_range}, {"fixed_points", fixed_points},
      {"scheme_oracles", scheme_oracles},     {"patterns_2d", patterns_2d},
      {"monte_carlo_rate", monte_carlo_rate},
  };
  std::vector<std::string> wanted(argv + 1, argv + argc);
  for (const auto& w : wanted) {
    const bool known = std::any_of(criteria.begin(), criteria.end(), [&](const auto& c) { return c.first == w; });
    if (!known) {
      std::cerr << "unknown criterion '" << w << "'\n";
      return 2;
    }
  }
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), name) == wanted.end()) continue;
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("error: ") + e.what();
    }
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
    failures += v.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
