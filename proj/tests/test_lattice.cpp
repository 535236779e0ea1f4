#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "splx/errors.hpp"
#include "splx/kernel.hpp"
#include "splx/lattice.hpp"
#include "splx/scenarios.hpp"

using namespace splx;

namespace {

LatticeConfig small_config(long n, double tau_fin) {
  LatticeConfig c;
  c.n_particles = n;
  c.kappa = 1.0;
  c.tau_fin = tau_fin;
  return c;
}

InitialDataSpec from_scenario(const std::string& name) {
  InitialDataSpec s;
  s.macro = scenario(name).profile;
  return s;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("zero macroscopic data gives the pure phases") {
  InitialDataSpec s;
  s.macro.xi_ini = 0.3;
  const auto c = small_config(100, 0.01);
  const auto u = sample_initial(s, c);
  for (long j = 1; j <= 100; ++j) {
    const double expect = 0.01 * j < 0.3 ? 1.0 : -1.0;
    CHECK(u[static_cast<std::size_t>(j - 1)] == expect);
  }
  const auto st = init(s, c);
  CHECK(st.k == 30);
}

TEST_CASE("arctan data is monotone within each phase with one jump") {
  InitialDataSpec s;
  s.variant = InitVariant::arctan;
  auto c = small_config(200, 0.01);
  s.arctan.j_star = 100;
  const auto u = sample_initial(s, c);
  long jumps = 0;
  for (std::size_t i = 1; i < u.size(); ++i) {
    if ((u[i] > 0) != (u[i - 1] > 0)) ++jumps;
    else CHECK(u[i] <= u[i - 1]);
  }
  CHECK(jumps == 1);
  CHECK_NOTHROW(init(s, c));
}

TEST_CASE("initial data errors") {
  auto c = small_config(10, 0.01);
  InitialDataSpec s;
  s.variant = InitVariant::raw;
  s.raw.assign(10, -1.0);
  s.raw[0] = 0.1;  // u_1 inside (-u*, u*)
  CHECK_THROWS_AS(init(s, c), InvariantViolation);
  try {
    init(s, c);
  } catch (const InvariantViolation& e) {
    CHECK(e.site() == 1);
  }
  s.raw.assign(10, 1.0);  // no minus phase at all
  CHECK_THROWS_AS(init(s, c), InvariantViolation);
  s.raw.assign(9, -1.0);
  CHECK_THROWS_AS(init(s, c), ConfigError);
  s.raw.assign(10, -1.0);
  s.raw[3] = 1.0;  // plus particle right of the interface
  CHECK_THROWS_AS(init(s, c), InvariantViolation);
  s.raw.assign(10, -1.0);
  s.alpha = 1e-3;
  s.raw[4] = -1.2;
  CHECK_THROWS_AS(init(s, c), DomainError);
}

TEST_CASE("configuration errors") {
  auto c = small_config(100, 0.01);
  c.dt = 1.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = small_config(2, 0.01);
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = small_config(100, -1.0);
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = small_config(100, 0.01);
  CHECK(c.step_size() <= c.max_dt());
  CHECK(c.step_size() * static_cast<double>(c.steps()) == doctest::Approx(c.t_fin()));
}

TEST_CASE("uniform minus state is a fixed point") {
  auto c = small_config(20, 0.01);
  InitialDataSpec s;
  s.variant = InitVariant::raw;
  s.raw.assign(20, -1.0);
  auto st = init(s, c);
  const auto params = derive_params(1.0);
  for (int n = 0; n < 50; ++n) st = step(st, 0.05, params);
  for (double u : st.u) CHECK(u == -1.0);
}

TEST_CASE("two-site perturbation in the plus phase relaxes") {
  auto c = small_config(20, 0.01);
  InitialDataSpec s;
  s.variant = InitVariant::raw;
  s.raw.assign(20, 1.0);
  s.raw[19] = -1.0;
  s.raw[5] = 1.3;
  s.raw[6] = 0.8;
  auto st = init(s, c);
  const auto params = derive_params(1.0);
  auto dev = [](const LatticeState& x) {
    const double mean = std::accumulate(x.u.begin(), x.u.begin() + 19, 0.0) / 19.0;
    double d = 0;
    for (int i = 0; i < 19; ++i) d += (x.u[i] - mean) * (x.u[i] - mean);
    return d;
  };
  double last = dev(st);
  for (int n = 0; n < 40; ++n) {
    st = step(st, 0.05, params);
    const double d = dev(st);
    CHECK(d < last);
    last = d;
  }
}

TEST_CASE("interface run: mass, monotone k, structure") {
  const auto c = small_config(200, 0.05);
  const auto run = simulate(c, from_scenario("hot_left"));
  CHECK(run.mass_drift < 1e-10);
  CHECK(run.log.K_eps >= 3);
  long k = 0;
  for (const auto& s : run.trajectory.snapshots) {
    CHECK(s.k >= k);
    k = s.k;
  }
  const auto rep = verify_structure(run);
  CHECK(rep.total() == 0);
  CHECK(rep.snapshots == static_cast<long>(run.trajectory.snapshots.size()));
  // every event snapshot sits exactly on a threshold
  const auto params = derive_params(1.0);
  for (const auto& s : run.trajectory.snapshots) {
    if (s.kind != SnapshotKind::event) continue;
    // after an exit through the top the index has already moved on
    const long j = s.event == EventKind::exit_high ? s.k - 1 : s.k;
    const double uk = s.u[static_cast<std::size_t>(j - run.trajectory.lo)];
    const double target = s.event == EventKind::exit_high ? params.u_star : -params.u_star;
    CHECK(uk == doctest::Approx(target).epsilon(1e-12));
  }
}

TEST_CASE("before the first entrance p follows the Neumann heat flow") {
  auto c = small_config(100, 0.002);
  const auto run = simulate(c, from_scenario("front_depinning"));
  REQUIRE(run.log.records.empty());
  const auto& tr = run.trajectory;
  NeumannFlow flow(tr.sites());
  const auto p0 = tr.p_of(tr.snapshots.front());
  const auto& last = tr.snapshots.back();
  const auto exact = flow.apply(p0, last.t);
  const auto p = tr.p_of(last);
  double err = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) err = std::max(err, std::abs(p[i] - exact[i]));
  CHECK(err < 5e-3);
  CHECK(sum(p) == doctest::Approx(sum(p0)).epsilon(1e-10));
}

TEST_CASE("padded mode keeps the interior dynamics close to Neumann") {
  auto c = small_config(100, 0.01);
  auto spec = from_scenario("hot_left");
  const auto a = simulate(c, spec);
  c.bc = BoundaryMode::padded;
  const auto b = simulate(c, spec);
  CHECK(b.trajectory.lo < 1);
  CHECK(verify_structure(b).total() == 0);
  CHECK(b.log.records.size() == a.log.records.size());
}

TEST_CASE("simulation is deterministic") {
  const auto c = small_config(100, 0.01);
  const auto a = simulate(c, from_scenario("hot_left"));
  const auto b = simulate(c, from_scenario("hot_left"));
  REQUIRE(a.trajectory.snapshots.size() == b.trajectory.snapshots.size());
  for (std::size_t i = 0; i < a.trajectory.snapshots.size(); ++i)
    CHECK(a.trajectory.snapshots[i].u == b.trajectory.snapshots[i].u);
}
