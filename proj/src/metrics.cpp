#include "swarm/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace swarm {

double l2_distance(const std::vector<double>& a, const std::vector<double>& b, const Grid& grid) {
  if (a.size() != b.size() || a.size() != grid.cells())
    throw ConfigError("l2_distance: fields do not match the grid (" + std::to_string(a.size()) +
                      " vs " + std::to_string(b.size()) + " values, " +
                      std::to_string(grid.cells()) + " cells)");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    sum += d * d;
  }
  return std::sqrt(sum * grid.cell_area());
}

std::vector<double> product(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ConfigError("product: size mismatch");
  std::vector<double> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
  return out;
}

double PatternMetrics::profile_peak_radius() const {
  if (radial_profile.empty()) return 0.0;
  const auto it = std::max_element(radial_profile.begin(), radial_profile.end());
  return (static_cast<double>(it - radial_profile.begin()) + 0.5) * radial_bin_width;
}

bool PatternMetrics::ring_present() const {
  return support_radius > 0.0 && profile_peak_radius() >= kRingFraction * support_radius;
}

namespace {

template <class F>
void for_neighbours(const Grid& g, int i, int j, F&& f) {
  const int reach2 = g.dim == 2 ? 1 : 0;
  for (int dj = -reach2; dj <= reach2; ++dj) {
    for (int di = -1; di <= 1; ++di) {
      if (di == 0 && dj == 0) continue;
      const int a = i + di, b = j + dj;
      if (a < 0 || a >= g.n[0] || b < 0 || b >= g.n[1]) continue;
      f(a, b);
    }
  }
}

// Plateau-aware maxima: cells not exceeded by any neighbour (up to a
// round-off slack) are grouped into connected components and each component
// counts once.
int count_local_maxima(const std::vector<double>& rho, const Grid& g, double peak) {
  const double slack = 1e-12 * peak;
  const double floor_value = kPeakFraction * peak;
  std::vector<char> candidate(g.cells(), 0);
  for (int j = 0; j < g.n[1]; ++j) {
    for (int i = 0; i < g.n[0]; ++i) {
      const double v = rho[g.index(i, j)];
      if (v <= floor_value) continue;
      bool top = true;
      for_neighbours(g, i, j, [&](int a, int b) {
        if (rho[g.index(a, b)] > v + slack) top = false;
      });
      candidate[g.index(i, j)] = top ? 1 : 0;
    }
  }
  int count = 0;
  std::vector<std::pair<int, int>> queue;
  for (int j = 0; j < g.n[1]; ++j) {
    for (int i = 0; i < g.n[0]; ++i) {
      if (candidate[g.index(i, j)] != 1) continue;
      ++count;
      candidate[g.index(i, j)] = 2;
      queue.assign(1, {i, j});
      while (!queue.empty()) {
        const auto [ci, cj] = queue.back();
        queue.pop_back();
        for_neighbours(g, ci, cj, [&](int a, int b) {
          char& c = candidate[g.index(a, b)];
          if (c == 1) {
            c = 2;
            queue.emplace_back(a, b);
          }
        });
      }
    }
  }
  return count;
}

}  // namespace

PatternMetrics pattern_metrics(const std::vector<double>& rho, const Grid& grid) {
  if (rho.size() != grid.cells()) throw ConfigError("pattern_metrics: field does not match grid");
  PatternMetrics m;
  double peak = 0.0;
  for (int j = 0; j < grid.n[1]; ++j) {
    for (int i = 0; i < grid.n[0]; ++i) {
      const double v = rho[grid.index(i, j)];
      const Vec2 x = grid.center(i, j);
      m.mass += v;
      m.centroid[0] += v * x[0];
      m.centroid[1] += v * x[1];
      peak = std::max(peak, v);
    }
  }
  if (!(m.mass > 0.0)) throw NumericalError("pattern_metrics: zero total mass");
  m.centroid[0] /= m.mass;
  m.centroid[1] /= m.mass;
  m.mass *= grid.cell_area();

  const double threshold = kSupportFraction * peak;
  auto in_support = [&](int i, int j) {
    return i >= 0 && i < grid.n[0] && j >= 0 && j < grid.n[1] &&
           rho[grid.index(i, j)] >= threshold;
  };
  auto distance = [](const Vec2& a, const Vec2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); };

  std::vector<Vec2> rim;
  for (int j = 0; j < grid.n[1]; ++j) {
    for (int i = 0; i < grid.n[0]; ++i) {
      if (!in_support(i, j)) continue;
      const Vec2 x = grid.center(i, j);
      m.support_radius = std::max(m.support_radius, distance(x, m.centroid));
      bool edge = !in_support(i - 1, j) || !in_support(i + 1, j);
      if (grid.dim == 2) edge = edge || !in_support(i, j - 1) || !in_support(i, j + 1);
      if (edge) rim.push_back(x);
    }
  }
  for (std::size_t a = 0; a < rim.size(); ++a)
    for (std::size_t b = a + 1; b < rim.size(); ++b)
      m.support_diameter = std::max(m.support_diameter, distance(rim[a], rim[b]));

  m.radial_profile.assign(kRadialBins, 0.0);
  if (m.support_radius > 0.0) {
    m.radial_bin_width = m.support_radius / kRadialBins;
    std::vector<int> hits(kRadialBins, 0);
    for (int j = 0; j < grid.n[1]; ++j) {
      for (int i = 0; i < grid.n[0]; ++i) {
        const double r = distance(grid.center(i, j), m.centroid);
        if (r > m.support_radius) continue;
        const int bin = std::min(kRadialBins - 1, static_cast<int>(r / m.radial_bin_width));
        m.radial_profile[bin] += rho[grid.index(i, j)];
        ++hits[bin];
      }
    }
    for (int b = 0; b < kRadialBins; ++b)
      if (hits[b] > 0) m.radial_profile[b] /= hits[b];
  }

  m.local_max_count = count_local_maxima(rho, grid, peak);
  return m;
}

}  // namespace swarm
