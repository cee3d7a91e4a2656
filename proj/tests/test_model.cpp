#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "swarm/config.hpp"
#include "swarm/macro.hpp"
#include "swarm/model.hpp"

using namespace swarm;

TEST_SUITE("model") {

TEST_CASE("indicator kernel on the closed ball") {
  const KernelSpec k{0.3};
  CHECK(kernel_eval(Vec2{0.0, 0.0}, k) == 1.0);
  CHECK(kernel_eval(Vec2{0.3, 0.0}, k) == 1.0);
  CHECK(kernel_eval(Vec2{0.0, -0.3}, k) == 1.0);
  CHECK(kernel_eval(Vec2{0.45, 0.0}, k) == 0.0);
  CHECK(kernel_eval(0.3, k) == 1.0);
  CHECK(kernel_eval(-0.45, k) == 0.0);
  CHECK(k.sup() == 1.0);
}

TEST_CASE("kernel is radially symmetric and bounded") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const KernelSpec k{0.5};
  for (int t = 0; t < 10000; ++t) {
    const Vec2 x{U(rng), U(rng)};
    const double b = kernel_eval(x, k);
    CHECK(b == kernel_eval(Vec2{-x[0], -x[1]}, k));
    CHECK(b >= 0.0);
    CHECK(b <= k.sup());
    if (std::hypot(x[0], x[1]) > k.radius) CHECK(b == 0.0);
  }
}

TEST_CASE("kernel moments") {
  CHECK(kernel_moment(0, KernelSpec{0.02}, 1) == doctest::Approx(0.04).epsilon(1e-14));
  CHECK(kernel_moment(0, KernelSpec{0.3}, 2) == doctest::Approx(std::numbers::pi * 0.09).epsilon(1e-14));
  // Frozen against the polar quadrature oracle (6 digits).
  CHECK(kernel_moment(1, KernelSpec{1.0}, 2) == doctest::Approx(2.0944).epsilon(1e-5));
  for (int k = 0; k <= 4; ++k) {
    for (double R : {0.01, 0.3, 1.0, 2.5}) {
      CHECK(kernel_moment(k, KernelSpec{R}, 2) ==
            doctest::Approx(oracle::polar_moment_2d(k, R)).epsilon(1e-9));
      CHECK(kernel_moment(k, KernelSpec{R}, 1) ==
            doctest::Approx(oracle::line_moment_1d(k, R)).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(kernel_moment(0, KernelSpec{1.0}, 3), ConfigError);
  CHECK_THROWS_AS(kernel_moment(-1, KernelSpec{1.0}, 2), ConfigError);
}

TEST_CASE("zeroth moment matches the stencil quadrature") {
  for (double R : {0.02, 0.25, 0.3, 0.4}) {
    for (int cells : {8, 16, 40}) {
      const double h = R / cells * 2.0;  // a handful of resolutions per radius
      const Grid g1 = Grid::make_1d(h * 200, 200);
      const Stencil s1 = Stencil::build(g1, R);
      const double q1 = s1.offsets.size() * s1.weight;
      CHECK(std::abs(q1 - kernel_moment(0, KernelSpec{R}, 1)) / kernel_moment(0, KernelSpec{R}, 1) <=
            2.0 * g1.dx[0] / R);
      const Grid g2 = Grid::make_2d(h * 100, h * 100, 100, 100);
      const Stencil s2 = Stencil::build(g2, R);
      const double q2 = s2.offsets.size() * s2.weight;
      CHECK(std::abs(q2 - kernel_moment(0, KernelSpec{R}, 2)) / kernel_moment(0, KernelSpec{R}, 2) <=
            2.0 * g2.dx[0] / R);
    }
  }
}

TEST_CASE("scaling of the particle coefficients") {
  ModelParams p;
  p.alpha0 = 0.01;
  p.beta0 = 0.5;
  p.gamma0 = 1.0;
  p.epsilon = 1e-3;
  const EffectiveParams e = apply_scaling(p);
  CHECK(e.alpha() == doctest::Approx(1e-5).epsilon(1e-14));
  CHECK(e.beta() == doctest::Approx(5e-4).epsilon(1e-14));
  CHECK(e.gamma() == doctest::Approx(1e-3).epsilon(1e-14));
  CHECK(e.mu() == doctest::Approx(1000.0).epsilon(1e-14));
  CHECK(e.eta() == doctest::Approx(1000.0).epsilon(1e-14));
  CHECK(e.delta() == 1e-3);
  CHECK(e.kernel().radius == p.R);

  p.epsilon = 1.0;
  const EffectiveParams id = apply_scaling(p);
  CHECK(id.alpha() == p.alpha0);
  CHECK(id.beta() == p.beta0);
  CHECK(id.gamma() == p.gamma0);
  CHECK(id.mu() == 1.0);
  CHECK(id.eta() == 1.0);

  p.epsilon = 1e-4;
  const EffectiveParams small = apply_scaling(p);
  CHECK(small.beta() == doctest::Approx(5e-5).epsilon(1e-14));
  CHECK(small.mu() == doctest::Approx(1e4).epsilon(1e-14));
  CHECK(small.eta() == doctest::Approx(1e4).epsilon(1e-14));

  p.epsilon = 0.0;
  CHECK_THROWS_AS(apply_scaling(p), ConfigError);
}

TEST_CASE("rate times strength is invariant under scaling") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> logeps(-6.0, 0.0);
  ModelParams p;
  p.alpha0 = 0.0225;
  p.beta0 = 0.7;
  p.gamma0 = 1.3;
  for (int t = 0; t < 1000; ++t) {
    p.epsilon = std::pow(10.0, logeps(rng));
    const EffectiveParams e = apply_scaling(p);
    CHECK(e.mu() * e.alpha() == doctest::Approx(p.alpha0).epsilon(1e-13));
    CHECK(e.mu() * e.beta() == doctest::Approx(p.beta0).epsilon(1e-13));
    CHECK(e.mu() * e.gamma() == doctest::Approx(p.gamma0).epsilon(1e-13));
  }
}

TEST_CASE("parameter validation") {
  ModelParams p;
  CHECK(validate(p).empty());
  p.nu = 1.0;
  CHECK(validate(p).size() == 1);
  p.nu = 1.2;
  CHECK_THROWS_AS(validate(p), ConfigError);
  p = {};
  p.nu = 0.0;
  CHECK_THROWS_AS(validate(p), ConfigError);
  p = {};
  p.D = -1e-3;
  CHECK_THROWS_AS(validate(p), ConfigError);
  p = {};
  p.R = 0.0;
  CHECK_THROWS_AS(validate(p), ConfigError);
  p = {};
  p.epsilon = std::nan("");
  CHECK_THROWS_AS(validate(p), ConfigError);
}

TEST_CASE("parameter config files") {
  const std::string text =
      "# 1D comparison\n"
      "alpha0 = 1e-2\n"
      "beta0=0.5   # alignment\n"
      "\n"
      "R = 2.5E-1\n"
      "D = 0\n";
  const ModelParams p = parse_params_config(text);
  CHECK(p.alpha0 == 0.01);
  CHECK(p.beta0 == 0.5);
  CHECK(p.R == 0.25);
  CHECK(p.D == 0.0);
  CHECK(p.gamma0 == ModelParams{}.gamma0);

  CHECK_THROWS_AS(parse_params_config("sigma = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_params_config("alpha0 = fast\n"), ParseError);
  CHECK_THROWS_AS(parse_params_config("alpha0\n"), ParseError);

  ModelParams q;
  q.alpha0 = 0.0225;
  q.nu = 0.2;
  q.epsilon = 1e-4;
  CHECK(parse_params_config(format_params_config(q)) == q);
  for (const char* key : kParamKeys) CHECK(is_param_key(key));
  CHECK_FALSE(is_param_key("sigma"));
}

TEST_CASE("grid geometry") {
  const Grid g = Grid::make_2d(2.0, 1.0, 80, 40);
  CHECK(g.dx[0] == 0.025);
  CHECK(g.dx[1] == 0.025);
  CHECK(g.cells() == 3200);
  CHECK(g.index(3, 2) == 2 * 80 + 3);
  CHECK(g.x1(0) == doctest::Approx(0.0125));
  CHECK(g.x2(39) == doctest::Approx(0.9875));
  for (int i = 0; i < g.n[0]; ++i) CHECK((g.x1(i) > 0.0 && g.x1(i) < g.extent[0]));
  CHECK(g.cell_area() == doctest::Approx(0.025 * 0.025));

  const Grid l = Grid::make_1d(50.0, 20000);
  CHECK(l.dx[0] == doctest::Approx(0.0025));
  CHECK(l.cell_area() == l.dx[0]);
  CHECK(l.contains({50.0, 123.0}));
  CHECK_FALSE(l.contains({-1e-9, 0.0}));
  CHECK_THROWS_AS(Grid::make_1d(1.0, 0), ConfigError);
}

TEST_CASE("macro state basics") {
  MacroState s(Grid::make_1d(1.0, 10));
  CHECK(s.all_finite());
  s.u[0][3] = std::nan("");
  CHECK_FALSE(s.all_finite());
}

}  // TEST_SUITE
