#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace swarm {

using Vec2 = std::array<double, 2>;

// Error hierarchy shared by every module. Callers that only care about
// "something went wrong at runtime" catch swarm::Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Base (unscaled) model parameters.
///
/// alpha0, beta0, gamma0 weight repulsion, alignment and attraction; mu and
/// eta are the velocity and leadership interaction rates; nu is the
/// leadership imitation rate; R the interaction radius; epsilon the scaling
/// parameter linking the particle model to the macroscopic limit; D the
/// artificial diffusion added to the momentum equation.
struct ModelParams {
  double alpha0 = 0.01;
  double beta0 = 0.5;
  double gamma0 = 1.0;
  double nu = 0.8;
  double mu = 1.0;
  double eta = 1.0;
  double R = 0.02;
  double epsilon = 1e-3;
  double D = 0.0;

  bool operator==(const ModelParams&) const = default;
};

/// Config keys, in the order they are written to files.
inline constexpr std::array<const char*, 9> kParamKeys = {
    "alpha0", "beta0", "gamma0", "nu", "mu", "eta", "R", "epsilon", "D"};

/// Throws ConfigError when an invariant is violated. Returns warnings for
/// accepted edge cases (nu == 1).
std::vector<std::string> validate(const ModelParams& p);

double get_param(const ModelParams& p, const std::string& key);
void set_param(ModelParams& p, const std::string& key, double value);
bool is_param_key(const std::string& key);

/// Flat `key = value` file with `#` comments. Every key must be a known
/// parameter key; missing keys keep the values of `defaults`.
ModelParams parse_params_config(const std::string& text, ModelParams defaults = {});
ModelParams load_params_config(const std::string& path, ModelParams defaults = {});
std::string format_params_config(const ModelParams& p);

// ---------------------------------------------------------------------------
// Interaction kernel

/// Indicator kernel B(|x|) = 1 on the closed ball of radius R.
struct KernelSpec {
  double radius = 0.02;

  double sup() const { return 1.0; }
};

double kernel_eval(const Vec2& offset, const KernelSpec& spec);
double kernel_eval(double offset, const KernelSpec& spec);

/// Analytic moment B_k = int |x|^k B(|x|) dx of the indicator kernel.
double kernel_moment(int k, const KernelSpec& spec, int dim);

// ---------------------------------------------------------------------------
// Scaling

/// Micro coefficients produced by apply_scaling(). Only apply_scaling() can
/// create one, so unscaled parameters never reach the particle engine.
class EffectiveParams {
 public:
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }
  double mu() const { return mu_; }
  double eta() const { return eta_; }
  double delta() const { return delta_; }
  double nu() const { return nu_; }
  const KernelSpec& kernel() const { return kernel_; }

  /// Same coefficients with both interaction rates set to zero (pure drift).
  EffectiveParams without_interactions() const;

 private:
  friend EffectiveParams apply_scaling(const ModelParams& base);
  EffectiveParams() = default;

  double alpha_ = 0.0, beta_ = 0.0, gamma_ = 0.0;
  double mu_ = 0.0, eta_ = 0.0;
  double delta_ = 0.0, nu_ = 0.0;
  KernelSpec kernel_{};
};

/// alpha = alpha0*eps, beta = beta0*eps, gamma = gamma0*eps,
/// mu_eff = eta_eff = 1/eps, delta = eps.
EffectiveParams apply_scaling(const ModelParams& base);

// ---------------------------------------------------------------------------
// Grid and macroscopic state

/// Uniform cell-centred grid on [0, extent1] (x [0, extent2] in 2D).
/// In 1D the second axis is degenerate: n[1] == 1 and dx[1] == 1.
struct Grid {
  int dim = 1;
  std::array<int, 2> n{1, 1};
  std::array<double, 2> extent{1.0, 1.0};
  std::array<double, 2> dx{1.0, 1.0};

  static Grid make_1d(double length, int cells);
  static Grid make_2d(double length1, double length2, int cells1, int cells2);

  std::size_t cells() const { return static_cast<std::size_t>(n[0]) * n[1]; }
  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(j) * n[0] + i;
  }
  double x1(int i) const { return (i + 0.5) * dx[0]; }
  double x2(int j) const { return dim == 2 ? (j + 0.5) * dx[1] : 0.0; }
  Vec2 center(int i, int j = 0) const { return {x1(i), x2(j)}; }
  double cell_area() const { return dim == 2 ? dx[0] * dx[1] : dx[0]; }
  bool contains(const Vec2& p) const;

  bool operator==(const Grid&) const = default;
};

/// Cell-centred density, velocity and mean leadership at time t.
struct MacroState {
  Grid grid;
  std::vector<double> rho;
  std::array<std::vector<double>, 2> u;
  std::vector<double> l;
  double t = 0.0;

  MacroState() = default;
  explicit MacroState(const Grid& g, double time = 0.0);

  bool all_finite() const;
  bool operator==(const MacroState&) const = default;
};

}  // namespace swarm
