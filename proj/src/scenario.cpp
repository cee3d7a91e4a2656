#include "swarm/scenario.hpp"

#include <cmath>
#include <numbers>

namespace swarm {

namespace {

double gaussian2(const Vec2& x, const Vec2& c, double sigma) {
  const double a = x[0] - c[0];
  const double b = x[1] - c[1];
  return std::exp(-a * a / (2 * sigma * sigma) - b * b / (2 * sigma * sigma));
}

Vec2 at_rest(const Vec2&) { return {0.0, 0.0}; }
double zero(const Vec2&) { return 0.0; }

Scenario two_groups(std::string name, const ModelParams& params, double T) {
  const Vec2 c3{0.4, 0.7};
  const Vec2 c4{0.6, 0.3};
  const double sigma = std::sqrt(0.004);
  Scenario s;
  s.name = std::move(name);
  s.grid = Grid::make_2d(1.0, 1.0, 100, 100);
  s.T = T;
  s.dt = 0.2;
  s.params = params;
  s.rho0 = [=](const Vec2& x) { return gaussian2(x, c3, sigma) + gaussian2(x, c4, sigma); };
  s.u0 = at_rest;
  s.l0 = zero;
  return s;
}

ModelParams table_params(double a, double b, double g, double eta, double mu, double nu, double R) {
  ModelParams p;
  p.alpha0 = a;
  p.beta0 = b;
  p.gamma0 = g;
  p.eta = eta;
  p.mu = mu;
  p.nu = nu;
  p.R = R;
  p.epsilon = 1.0;  // only the particle model reads epsilon
  p.D = 1e-3;
  return p;
}

}  // namespace

int Scenario::steps() const {
  if (!(dt > 0) || !(T >= 0)) throw ConfigError("scenario '" + name + "': need dt > 0 and T >= 0");
  const double ratio = T / dt;
  const long long n = std::llround(ratio);
  if (std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio))
    throw ConfigError("scenario '" + name + "': T must be a multiple of dt");
  return static_cast<int>(n);
}

std::vector<int> Scenario::snapshot_steps() const {
  const int total = steps();
  std::vector<int> out{0};
  const int slots = snapshot_count + 1;
  for (int k = 1; k <= slots; ++k) {
    const int step = static_cast<int>(std::llround(static_cast<double>(k) * total / slots));
    if (step > out.back()) out.push_back(step);
  }
  return out;
}

MacroState Scenario::initial_state() const {
  MacroState s(grid, 0.0);
  for (int j = 0; j < grid.n[1]; ++j) {
    for (int i = 0; i < grid.n[0]; ++i) {
      const Vec2 x = grid.center(i, j);
      const std::size_t k = grid.index(i, j);
      s.rho[k] = rho0(x);
      const Vec2 v = u0(x);
      s.u[0][k] = v[0];
      s.u[1][k] = grid.dim == 2 ? v[1] : 0.0;
      s.l[k] = l0(x);
    }
  }
  return s;
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"test1d", "test2da", "test2db", "test2db_lbc1",
                                              "test2dc", "custom"};
  return names;
}

Scenario make_test1d(double R, double epsilon) {
  if (!(R > 0)) throw ConfigError("test1d: R must be > 0");
  const double length = 1.0 / R;
  const double x0 = 1.0 / (2.0 * R);
  const double sigma = 0.1 / R;
  const double dx_target = R / 8.0;

  Scenario s;
  s.name = "test1d";
  s.grid = Grid::make_1d(length, static_cast<int>(std::llround(length / dx_target)));
  s.T = 5.0;
  s.dt = epsilon;
  s.params = ModelParams{};
  s.params.alpha0 = 0.01;
  s.params.beta0 = 0.5;
  s.params.gamma0 = 1.0;
  s.params.eta = 1.0;
  s.params.mu = 1.0;
  s.params.nu = 0.8;
  s.params.R = R;
  s.params.epsilon = epsilon;
  s.params.D = 0.0;
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * sigma * sigma);
  s.rho0 = [=](const Vec2& x) {
    const double a = x[0] - x0;
    return norm * std::exp(-a * a / (2.0 * sigma * sigma));
  };
  s.u0 = at_rest;
  s.l0 = zero;
  return s;
}

Scenario build_scenario(std::string_view name) {
  if (name == "test1d") return make_test1d(0.02);

  if (name == "test2da") {
    const Vec2 c0{1.0, 1.0}, c1{0.8, 0.8}, c2{1.3, 1.3};
    const double s0 = std::sqrt(0.03), s12 = std::sqrt(0.02);
    Scenario s;
    s.name = "test2da";
    s.grid = Grid::make_2d(2.0, 2.0, 80, 80);
    s.T = 300.0;
    s.dt = 0.1;
    s.params = table_params(0.0225, 0.5, 0.5, 0.05, 0.5, 0.8, 0.3);
    s.rho0 = [=](const Vec2& x) { return gaussian2(x, c0, s0); };
    s.u0 = at_rest;
    s.l0 = [=](const Vec2& x) { return 0.9 * gaussian2(x, c1, s12) + 0.8 * gaussian2(x, c2, s12); };
    return s;
  }

  if (name == "test2db") {
    return two_groups("test2db", table_params(0.01, 0.1, 1.3, 0.3, 1.5, 0.2, 0.25), 350.0);
  }

  if (name == "test2db_lbc1") {
    Scenario s = two_groups("test2db_lbc1", table_params(0.01, 0.1, 1.3, 0.3, 1.5, 0.2, 0.25), 350.0);
    s.bc.l = 1.0;
    return s;
  }

  if (name == "test2dc") {
    return two_groups("test2dc", table_params(0.01, 1.0, 0.4, 2.0, 3.0, 1.0, 0.4), 100.0);
  }

  if (name == "custom") {
    // Single resting flock in the unit square; meant to be reshaped by overrides.
    Scenario s = two_groups("custom", table_params(0.01, 0.1, 1.3, 0.3, 1.5, 0.2, 0.25), 50.0);
    const double sigma = std::sqrt(0.004);
    s.rho0 = [=](const Vec2& x) { return gaussian2(x, {0.5, 0.5}, sigma); };
    return s;
  }

  std::string valid;
  for (const auto& n : scenario_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw ConfigError("unknown scenario '" + std::string(name) + "' (valid: " + valid + ")");
}

void SnapshotSeries::set_meta(const std::string& key, const std::string& value) {
  for (auto& [k, v] : metadata) {
    if (k == key) {
      v = value;
      return;
    }
  }
  metadata.emplace_back(key, value);
}

const std::string* SnapshotSeries::find_meta(const std::string& key) const {
  for (const auto& [k, v] : metadata)
    if (k == key) return &v;
  return nullptr;
}

}  // namespace swarm
