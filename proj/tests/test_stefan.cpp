#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "splx/lattice.hpp"
#include "splx/scenarios.hpp"
#include "splx/stefan.hpp"

using namespace splx;

namespace {

StefanGrid grid(long cells) {
  StefanGrid g;
  g.cells = cells;
  g.samples = 50;
  return g;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("zero data stays zero and the interface stays put") {
  const auto s = solve_stefan([](double) { return 0.0; }, 0.4, 1.0, 0.05, grid(200));
  for (const auto& p : s.P) CHECK(max_abs(p) < 1e-14);
  for (double x : s.Xi) CHECK(x == 0.4);
  CHECK_FALSE(s.truncated);
}

TEST_CASE("constant data below p* is stationary") {
  const auto s = solve_stefan([](double) { return 0.3; }, 0.5, 1.0, 0.05, grid(200));
  for (const auto& p : s.P)
    for (double v : p) CHECK(v == doctest::Approx(0.3).epsilon(1e-12));
  for (double x : s.Xi) CHECK(x == 0.5);
  for (auto r : s.regime) CHECK(r == Regime::pinned);
}

TEST_CASE("trace below p* with decaying data ahead pins forever") {
  MacroProfile m;
  m.xi_ini = 0.5;
  m.level = 0.3;
  m.slope_left = -0.2;
  m.slope_right = -0.4;
  for (long cells : {200L, 400L}) {
    const auto s = solve_stefan([&m](double x) { return m(x); }, 0.5, 1.0, 0.1, grid(cells));
    for (double x : s.Xi) CHECK(x == 0.5);
  }
}

TEST_CASE("moving front keeps the trace at p* and advances") {
  const auto sc = scenario("hot_left");
  const auto& m = sc.profile;
  const auto s = solve_stefan([&m](double x) { return m(x); }, m.xi_ini, 1.0, sc.tau_fin, grid(400));
  CHECK(s.Xi.back() > m.xi_ini + 0.02);
  for (std::size_t i = 1; i < s.Xi.size(); ++i) CHECK(s.Xi[i] >= s.Xi[i - 1]);
  // trace at the end of the run
  const double trace = s.field_at(s.P.size() - 1, s.Xi.back());
  CHECK(trace == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("interface self-converges under grid refinement") {
  const auto sc = scenario("front_pinning");
  const auto& m = sc.profile;
  auto f = [&m](double x) { return m(x); };
  const auto a = solve_stefan(f, m.xi_ini, 1.0, sc.tau_fin, grid(200));
  const auto b = solve_stefan(f, m.xi_ini, 1.0, sc.tau_fin, grid(400));
  const auto c = solve_stefan(f, m.xi_ini, 1.0, sc.tau_fin, grid(800));
  double e1 = 0.0, e2 = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double tau = sc.tau_fin * i / 100.0;
    e1 = std::max(e1, std::abs(a.interface_at(tau) - c.interface_at(tau)));
    e2 = std::max(e2, std::abs(b.interface_at(tau) - c.interface_at(tau)));
  }
  CHECK(e2 < e1);
  CHECK(e2 < 0.01);
  // advances first, then pins
  CHECK(c.Xi.back() > m.xi_ini);
  CHECK(c.curve_regime.back() == Regime::pinned);
}
