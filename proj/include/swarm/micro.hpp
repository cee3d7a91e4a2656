#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "swarm/model.hpp"
#include "swarm/scenario.hpp"

namespace swarm {

enum class LeadershipRule { binary, generalized };

LeadershipRule parse_leadership_rule(const std::string& name);
const char* to_string(LeadershipRule rule);

struct MicroConfig {
  std::size_t N = 100000;
  double dt = 1e-3;
  double T = 5.0;
  LeadershipRule rule = LeadershipRule::generalized;
  std::uint64_t seed = 42;
  /// false runs pure drift (both interaction rates forced to zero).
  bool interactions = true;
};

struct MicroCounters {
  std::uint64_t coincident = 0;      // accepted velocity events with |x - x*| < 1e-12
  std::uint64_t clamped = 0;         // leadership values pulled back into [0, 1]
  std::uint64_t removed = 0;         // particles absorbed at the boundary
  std::uint64_t outside_binned = 0;  // particles binned into a boundary cell from outside
  std::uint64_t velocity_events = 0;
  std::uint64_t leadership_events = 0;
};

/// Particle system. Positions and velocities are stored flat with stride
/// `dim`; lambda holds the degree of leadership of each particle.
struct Ensemble {
  int dim = 1;
  std::vector<double> x;
  std::vector<double> v;
  std::vector<double> lambda;
  std::size_t initial_count = 0;
  std::mt19937_64 rng;
  MicroCounters counters;

  std::size_t size() const { return lambda.size(); }
  void add(const Vec2& pos, const Vec2& vel, double lam);

  // Pairing scratch buffer, reused across steps.
  std::vector<std::uint32_t> order;
};

/// State of one interaction partner.
struct Agent {
  Vec2 x{0.0, 0.0};
  Vec2 v{0.0, 0.0};
  double lambda = 0.0;
};

/// Post-interaction velocity of `self` after meeting `other`:
///   v' = v + alpha (x - x*)/|x - x*|^2 + (1 - lambda)(beta (v* - v) + gamma (x* - x)).
/// The repulsion term is dropped when |x - x*| < 1e-12 and `coincident` is set.
Vec2 velocity_update(const Agent& self, const Agent& other, double alpha, double beta,
                     double gamma, int dim, bool* coincident = nullptr);

/// Unclamped leadership update after an accepted leadership event.
/// binary: 1 - lambda.
/// generalized: lambda + nu (lambda* - lambda) + delta (1 - 2 lambda + nu (lambda - lambda*)).
double leadership_update(double lambda, double lambda_star, LeadershipRule rule, double nu,
                         double delta);

/// Momentum-exchanging part of the velocity rule:
///   v_bar' = v + (1 - (lambda + lambda*)/2) beta (v* - v), and symmetrically for v*.
std::pair<Vec2, Vec2> conservative_velocity_core(const Vec2& v, const Vec2& v_star, double lambda,
                                                 double lambda_star, double beta);

/// Imitation part of the generalized leadership rule:
///   lambda_bar' = lambda + nu (lambda* - lambda), and symmetrically for lambda*.
std::pair<double, double> conservative_leadership_core(double lambda, double lambda_star,
                                                       double nu);

/// Applies the outcome of one pair event to particles i and j. Both updates
/// read the pre-event states.
void apply_pair_event(Ensemble& ens, std::size_t i, std::size_t j, bool theta, bool sigma,
                      const EffectiveParams& params, LeadershipRule rule);

/// Samples N particles from the scenario's initial data (1D only).
Ensemble init_ensemble(const Scenario& scenario, std::size_t N, std::uint64_t seed);

void drift_step(Ensemble& ens, double dt);

/// Random disjoint pairing, then independent Bernoulli gates per pair.
void interaction_step(Ensemble& ens, const EffectiveParams& params, double dt,
                      LeadershipRule rule);

/// Drops particles outside the grid's domain. Returns how many were removed.
std::size_t remove_outside(Ensemble& ens, const Grid& grid);

/// Histogram moments: rho = count / (initial_count * cell_area), u and l are
/// cell means; empty cells are (0, 0, 0).
MacroState moments_on_grid(const Ensemble& ens, const Grid& grid, double t = 0.0,
                           std::uint64_t* outside = nullptr);

/// Largest dt allowed by the Bernoulli gates: 1 / (max(mu, eta) sup B).
double consistency_bound(const EffectiveParams& params);

using EnsembleObserver = std::function<void(int step, const Ensemble&)>;

SnapshotSeries run_micro(const Scenario& scenario, const MicroConfig& config,
                         const EnsembleObserver& observer = {});

}  // namespace swarm
