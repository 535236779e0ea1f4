#include <cmath>
#include <vector>

#include "doctest.h"
#include "splx/errors.hpp"
#include "splx/kernel.hpp"

using namespace splx;

namespace {

// Classical RK4 on dg/dt = Delta g over |j| <= 60, zero outside.
std::vector<double> rk4_kernel(double t_end, double dt = 1e-4) {
  const int w = 60;
  const int m = 2 * w + 1;
  std::vector<double> g(m, 0.0), k1(m), k2(m), k3(m), k4(m), tmp(m);
  g[w] = 1.0;
  auto lap = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (int i = 0; i < m; ++i) {
      const double l = i > 0 ? v[i - 1] : 0.0;
      const double r = i < m - 1 ? v[i + 1] : 0.0;
      out[i] = l + r - 2.0 * v[i];
    }
  };
  const long steps = std::lround(t_end / dt);
  for (long s = 0; s < steps; ++s) {
    lap(g, k1);
    for (int i = 0; i < m; ++i) tmp[i] = g[i] + 0.5 * dt * k1[i];
    lap(tmp, k2);
    for (int i = 0; i < m; ++i) tmp[i] = g[i] + 0.5 * dt * k2[i];
    lap(tmp, k3);
    for (int i = 0; i < m; ++i) tmp[i] = g[i] + dt * k3[i];
    lap(tmp, k4);
    for (int i = 0; i < m; ++i) g[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return g;
}

}  // namespace

TEST_CASE("kernel at time zero is the Kronecker delta") {
  CHECK(heat_kernel(0, 0.0) == 1.0);
  CHECK(heat_kernel(3, 0.0) == 0.0);
  CHECK(heat_kernel(-1, 0.0) == 0.0);
  CHECK_THROWS_AS(heat_kernel(0, -1.0), DomainError);
}

TEST_CASE("closed form matches the RK4 oracle") {
  // frozen oracle values at t = 1
  CHECK(heat_kernel(0, 1.0) == doctest::Approx(0.308508).epsilon(1e-6));
  CHECK(heat_kernel(1, 1.0) == doctest::Approx(0.215269).epsilon(1e-6));
  for (double t : {0.1, 1.0, 10.0}) {
    const auto g = rk4_kernel(t);
    for (int j = -20; j <= 20; ++j) {
      CHECK(std::abs(heat_kernel(j, t) - g[j + 60]) < 1e-8);
    }
  }
}

TEST_CASE("kernel mass, positivity and symmetry") {
  for (double t : {0.1, 1.0, 100.0, 1e4, 1e6}) {
    const auto g = kernel_eval(t, 1e-10);
    double mass = 0.0;
    for (long j = -g.radius; j <= g.radius; ++j) {
      CHECK(g.at(j) >= 0.0);
      CHECK(g.at(j) == g.at(-j));
      mass += g.at(j);
    }
    CHECK(g.tail_bound < 1e-10);
    CHECK(std::abs(mass - 1.0) <= g.tail_bound + 1e-12);
  }
}

TEST_CASE("large times stay finite") {
  const double v = heat_kernel(0, 1e6);
  CHECK(std::isfinite(v));
  // g_0(t) ~ (4 pi t)^{-1/2}
  CHECK(v == doctest::Approx(1.0 / std::sqrt(4.0 * M_PI * 1e6)).epsilon(1e-5));
}

TEST_CASE("semigroup_apply examples") {
  WindowedField delta{-100, std::vector<double>(201, 0.0)};
  delta.values[100] = 2.0;
  const auto out = semigroup_apply(delta, 1.0);
  CHECK(out.at(0) == doctest::Approx(0.617016).epsilon(1e-6));

  const auto same = semigroup_apply(delta, 0.0);
  CHECK(same.values == delta.values);

  WindowedField constant{1, std::vector<double>(50, 0.7)};
  const auto c = semigroup_apply(constant, 37.0, Boundary::neumann);
  for (double x : c.values) CHECK(x == doctest::Approx(0.7).epsilon(1e-12));
  const auto c2 = semigroup_apply(constant, 1e5, Boundary::neumann);
  for (double x : c2.values) CHECK(x == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("window too small reports the required size") {
  WindowedField delta{-5, std::vector<double>(11, 0.0)};
  delta.values[5] = 1.0;
  try {
    semigroup_apply(delta, 100.0);
    FAIL("expected WindowTooSmall");
  } catch (const WindowTooSmall& e) {
    const long r = truncation_radius(100.0, 1e-10);
    CHECK(e.required_size() == static_cast<std::size_t>(2 * r + 1));
  }
}

TEST_CASE("mass conservation, maximum principle, semigroup property") {
  WindowedField f{-200, std::vector<double>(401, 0.0)};
  for (int j = -10; j <= 10; ++j) f.values[j + 200] = std::sin(0.7 * j) + 0.3 * (j % 3);
  double mn = 0, mx = 0, mass = 0;
  for (double x : f.values) {
    mn = std::min(mn, x);
    mx = std::max(mx, x);
    mass += x;
  }
  const double tol = 1e-10;
  const auto a = semigroup_apply(f, 3.0, Boundary::free, tol);
  double mass_a = 0;
  for (double x : a.values) {
    CHECK(x >= mn - 1e-14);
    CHECK(x <= mx + 1e-14);
    mass_a += x;
  }
  CHECK(std::abs(mass_a - mass) <= 21 * tol);
  const auto b = semigroup_apply(a, 5.0, Boundary::free, tol);
  const auto c = semigroup_apply(f, 8.0, Boundary::free, tol);
  for (std::size_t i = 0; i < b.values.size(); ++i) {
    CHECK(std::abs(b.values[i] - c.values[i]) <= 10 * 21 * tol);
  }
}

TEST_CASE("spectral Neumann flow agrees with the method of images") {
  std::vector<double> v(37);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::cos(0.3 * i * i) + (i < 10 ? 1.0 : 0.0);
  const NeumannFlow flow(v.size());
  for (double t : {0.0, 0.5, 3.0, 40.0, 900.0}) {
    const auto s = flow.apply(v, t);
    const auto m = neumann_images_apply(v, t, 1e-13);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(s[i] - m[i]) < 1e-11);
    const auto c = flow.forward(v);
    CHECK(flow.value_at(c, 5, t) == doctest::Approx(s[5]).epsilon(1e-12));
  }
  // Laplacian at a site against differences of the evolved field.
  const auto c = flow.forward(v);
  const auto s = flow.apply(v, 2.0);
  const double lap = s[4] + s[6] - 2.0 * s[5];
  CHECK(flow.laplacian_at(c, 5, 2.0) == doctest::Approx(lap).epsilon(1e-10));
  const double lap0 = s[1] - s[0];
  CHECK(flow.laplacian_at(c, 0, 2.0) == doctest::Approx(lap0).epsilon(1e-10));
}

TEST_CASE("decay constants") {
  const auto rep = kernel_decay_constants();
  CHECK(rep.max_mass_error < 1e-12);
  CHECK(rep.max_rate_ratio <= 1.0 + 1e-12);
  CHECK(rep.sup_trend_nonincreasing);
  CHECK(rep.slope_sup == doctest::Approx(-0.5).epsilon(0.1));
  CHECK(rep.slope_grad_l2 == doctest::Approx(-1.5).epsilon(0.1));
  CHECK(rep.c_sup == doctest::Approx(1.0));  // attained at t = 0
  CHECK(rep.c_grad_l2 == doctest::Approx(2.0));
}
