#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "splx/errors.hpp"
#include "splx/fluctuations.hpp"
#include "splx/interface.hpp"
#include "splx/macro.hpp"
#include "splx/scenarios.hpp"
#include "splx/stefan.hpp"

using namespace splx;

namespace {

TransitionLog scripted(double eps, double t_fin, const std::vector<double>& stars, long k0) {
  std::vector<Event> ev;
  long k = k0;
  for (double ts : stars) {
    ev.push_back({ts - 1.0, EventKind::enter, k, 0.0, 0.0});
    ev.push_back({ts, EventKind::exit_high, k, 0.0, 0.0});
    ++k;
  }
  return track(ev, k0, t_fin, eps);
}

}  // namespace

TEST_CASE("integer part rounding convention") {
  const double eps = 0.01;
  CHECK(integer_part(0.5 * eps, eps) == 0);
  CHECK(integer_part(0.5 * eps + 1e-12, eps) == 1);
  CHECK(integer_part(1.5 * eps, eps) == 1);
  CHECK(integer_part(1.5 * eps + 1e-12, eps) == 2);
  CHECK(integer_part(3.0 * eps, eps) == 3);
  CHECK(integer_part(2.6 * eps, eps) == 3);
}

TEST_CASE("regime detection on scripted logs") {
  const double eps = 0.01, tau_fin = 0.1;
  const double t_fin = tau_fin / (eps * eps);
  std::vector<double> early;
  for (double t = 20.0; t <= 400.0; t += 20.0) early.push_back(t);
  const auto pin = detect_regimes(scripted(eps, t_fin, early, 40), tau_fin);
  CHECK(pin.advance_then_pin);
  CHECK_FALSE(pin.depinning);
  CHECK(pin.pin_time == doctest::Approx(0.04).epsilon(0.15));

  std::vector<double> late;
  for (double t = 520.0; t <= 1000.0; t += 20.0) late.push_back(t);
  const auto dep = detect_regimes(scripted(eps, t_fin, late, 40), tau_fin);
  CHECK(dep.depinning);
  CHECK_FALSE(dep.advance_then_pin);
  CHECK(dep.depin_time == doctest::Approx(0.05).epsilon(0.15));

  const auto none = detect_regimes(scripted(eps, t_fin, {}, 40), tau_fin);
  CHECK_FALSE(none.depinning);
  CHECK_FALSE(none.advance_then_pin);
}

TEST_CASE("rescaled fields of a lattice run") {
  LatticeConfig c;
  c.n_particles = 100;
  c.tau_fin = 0.05;
  c.dt = 0.01;
  InitialDataSpec s;
  s.macro = scenario("hot_left").profile;
  const auto run = simulate(c, s);
  FluctuationEngine eng(run.trajectory, run.log);
  const auto f = rescale(run.trajectory, run.log, &eng);
  REQUIRE(f.decomposed);
  CHECK(f.gamma_measure <= f.epsilon * f.tau_fin);
  CHECK(f.formula_residual < 5e-3);
  CHECK(f.xi.front() > 0.5 * f.epsilon);
  for (std::size_t r = 0; r < f.tau.size(); ++r) {
    CHECK(f.Xi_star[r] <= f.Xi_hash[r]);
    for (std::size_t i = 0; i < f.xi.size(); ++i) {
      if (f.xi[i] < f.Xi_star[r]) CHECK(f.M[r][i] == 1.0);
      if (f.xi[i] > f.Xi_hash[r]) CHECK(f.M[r][i] == -1.0);
      // U = P + M one cell away from the interface cells
      if (f.xi[i] < f.Xi_star[r] - f.epsilon || f.xi[i] > f.Xi_hash[r] + f.epsilon)
        CHECK(std::abs(f.U[r][i] - f.P[r][i] - f.M[r][i]) < 1e-12);
    }
  }
  CHECK_THROWS_AS(sample_field(run.trajectory, 1.0, 0.5), DomainError);
}

TEST_CASE("stationary data compares to within sampling error") {
  const auto sc = scenario("stationary");
  const auto& m = sc.profile;
  LatticeConfig c;
  c.n_particles = 100;
  c.tau_fin = sc.tau_fin;
  InitialDataSpec s;
  s.macro = m;
  const auto run = simulate(c, s);
  CHECK(run.log.records.empty());
  StefanGrid g;
  g.cells = 200;
  const auto st = solve_stefan([&m](double x) { return m(x); }, m.xi_ini, 1.0, sc.tau_fin, g);
  const auto rep = compare({{&run.trajectory, &run.log, nullptr, 1}}, st, 1);
  REQUIRE(rep.entries.size() == 1);
  CHECK(rep.entries[0].field_error < 1e-12);
  CHECK(rep.entries[0].interface_error <= c.eps());
  CHECK(rep.entries[0].gamma_bound);
  CHECK_THROWS_AS(compare({{&run.trajectory, &run.log, nullptr, 2}}, st, 1), DomainError);
}
