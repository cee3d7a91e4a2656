#pragma once

#include <vector>

#include "swarm/model.hpp"

namespace swarm {

/// sqrt(sum_k (a_k - b_k)^2 * cell_area). Throws ConfigError on size mismatch.
double l2_distance(const std::vector<double>& a, const std::vector<double>& b, const Grid& grid);

/// Pointwise product, e.g. rho * u for moment comparisons.
std::vector<double> product(const std::vector<double>& a, const std::vector<double>& b);

struct PatternMetrics {
  Vec2 centroid{0.0, 0.0};
  double mass = 0.0;
  /// Largest distance from the centroid to a cell with rho >= 1% of max.
  double support_radius = 0.0;
  /// Largest distance between two support cells.
  double support_diameter = 0.0;
  /// Mean rho per radial bin, 32 bins over [0, support_radius].
  std::vector<double> radial_profile;
  double radial_bin_width = 0.0;
  int local_max_count = 0;

  /// Radius at the centre of the profile's highest bin.
  double profile_peak_radius() const;
  /// Ring criterion: profile peak at or beyond 40% of the support radius.
  bool ring_present() const;
};

inline constexpr int kRadialBins = 32;
inline constexpr double kSupportFraction = 0.01;
inline constexpr double kPeakFraction = 0.10;
inline constexpr double kRingFraction = 0.4;

/// Throws NumericalError when the total mass is zero.
PatternMetrics pattern_metrics(const std::vector<double>& rho, const Grid& grid);

}  // namespace swarm
