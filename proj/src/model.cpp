#include "swarm/model.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "swarm/config.hpp"

namespace swarm {

std::vector<std::string> validate(const ModelParams& p) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("invalid model parameters: ") + what);
  };
  require(std::isfinite(p.alpha0) && p.alpha0 > 0, "alpha0 must be > 0");
  require(std::isfinite(p.beta0) && p.beta0 > 0, "beta0 must be > 0");
  require(std::isfinite(p.gamma0) && p.gamma0 > 0, "gamma0 must be > 0");
  require(std::isfinite(p.mu) && p.mu > 0, "mu must be > 0");
  require(std::isfinite(p.eta) && p.eta > 0, "eta must be > 0");
  require(std::isfinite(p.R) && p.R > 0, "R must be > 0");
  require(std::isfinite(p.epsilon) && p.epsilon > 0, "epsilon must be > 0");
  require(std::isfinite(p.D) && p.D >= 0, "D must be >= 0");
  require(std::isfinite(p.nu) && p.nu > 0 && p.nu <= 1, "nu must lie in (0, 1]");

  std::vector<std::string> warnings;
  if (p.nu == 1.0) {
    warnings.emplace_back(
        "nu = 1: leadership variance no longer relaxes, the monokinetic "
        "leadership closure is not justified");
  }
  return warnings;
}

double get_param(const ModelParams& p, const std::string& key) {
  if (key == "alpha0") return p.alpha0;
  if (key == "beta0") return p.beta0;
  if (key == "gamma0") return p.gamma0;
  if (key == "nu") return p.nu;
  if (key == "mu") return p.mu;
  if (key == "eta") return p.eta;
  if (key == "R") return p.R;
  if (key == "epsilon") return p.epsilon;
  if (key == "D") return p.D;
  throw ConfigError("unknown parameter key '" + key + "'");
}

void set_param(ModelParams& p, const std::string& key, double value) {
  if (key == "alpha0") p.alpha0 = value;
  else if (key == "beta0") p.beta0 = value;
  else if (key == "gamma0") p.gamma0 = value;
  else if (key == "nu") p.nu = value;
  else if (key == "mu") p.mu = value;
  else if (key == "eta") p.eta = value;
  else if (key == "R") p.R = value;
  else if (key == "epsilon") p.epsilon = value;
  else if (key == "D") p.D = value;
  else throw ConfigError("unknown parameter key '" + key + "'");
}

bool is_param_key(const std::string& key) {
  for (const char* k : kParamKeys)
    if (key == k) return true;
  return false;
}

ModelParams parse_params_config(const std::string& text, ModelParams defaults) {
  for (const auto& entry : parse_key_values(text)) {
    if (!is_param_key(entry.key)) {
      throw ConfigError("line " + std::to_string(entry.line) + ": unknown parameter key '" +
                        entry.key + "'");
    }
    set_param(defaults, entry.key, parse_double(entry.value, entry.key));
  }
  return defaults;
}

ModelParams load_params_config(const std::string& path, ModelParams defaults) {
  return parse_params_config(read_text_file(path), defaults);
}

std::string format_params_config(const ModelParams& p) {
  std::ostringstream out;
  for (const char* key : kParamKeys) out << key << " = " << format_double(get_param(p, key)) << '\n';
  return out.str();
}

double kernel_eval(const Vec2& offset, const KernelSpec& spec) {
  const double r = std::hypot(offset[0], offset[1]);
  return r <= spec.radius ? 1.0 : 0.0;
}

double kernel_eval(double offset, const KernelSpec& spec) {
  return std::abs(offset) <= spec.radius ? 1.0 : 0.0;
}

double kernel_moment(int k, const KernelSpec& spec, int dim) {
  if (k < 0) throw ConfigError("kernel moment order must be >= 0");
  const double R = spec.radius;
  // Surface measure of the unit sphere times int_0^R r^(k+d-1) dr.
  switch (dim) {
    case 1:
      return 2.0 * std::pow(R, k + 1) / (k + 1);
    case 2:
      return 2.0 * std::numbers::pi * std::pow(R, k + 2) / (k + 2);
    default:
      throw ConfigError("kernel_moment: unsupported dimension " + std::to_string(dim));
  }
}

EffectiveParams EffectiveParams::without_interactions() const {
  EffectiveParams copy = *this;
  copy.mu_ = 0.0;
  copy.eta_ = 0.0;
  return copy;
}

EffectiveParams apply_scaling(const ModelParams& base) {
  if (!(base.epsilon > 0)) throw ConfigError("apply_scaling: epsilon must be > 0");
  const double eps = base.epsilon;
  EffectiveParams e;
  e.alpha_ = base.alpha0 * eps;
  e.beta_ = base.beta0 * eps;
  e.gamma_ = base.gamma0 * eps;
  e.mu_ = 1.0 / eps;
  e.eta_ = 1.0 / eps;
  e.delta_ = eps;
  e.nu_ = base.nu;
  e.kernel_.radius = base.R;
  return e;
}

Grid Grid::make_1d(double length, int cells) {
  if (!(length > 0) || cells < 1) throw ConfigError("Grid::make_1d: need length > 0 and cells >= 1");
  Grid g;
  g.dim = 1;
  g.n = {cells, 1};
  g.extent = {length, 1.0};
  g.dx = {length / cells, 1.0};
  return g;
}

Grid Grid::make_2d(double length1, double length2, int cells1, int cells2) {
  if (!(length1 > 0) || !(length2 > 0) || cells1 < 1 || cells2 < 1)
    throw ConfigError("Grid::make_2d: need positive lengths and cell counts");
  Grid g;
  g.dim = 2;
  g.n = {cells1, cells2};
  g.extent = {length1, length2};
  g.dx = {length1 / cells1, length2 / cells2};
  return g;
}

bool Grid::contains(const Vec2& p) const {
  if (p[0] < 0.0 || p[0] > extent[0]) return false;
  if (dim == 2 && (p[1] < 0.0 || p[1] > extent[1])) return false;
  return true;
}

MacroState::MacroState(const Grid& g, double time)
    : grid(g),
      rho(g.cells(), 0.0),
      u{std::vector<double>(g.cells(), 0.0), std::vector<double>(g.cells(), 0.0)},
      l(g.cells(), 0.0),
      t(time) {}

bool MacroState::all_finite() const {
  auto finite = [](const std::vector<double>& v) {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  };
  return finite(rho) && finite(u[0]) && finite(u[1]) && finite(l);
}

}  // namespace swarm
