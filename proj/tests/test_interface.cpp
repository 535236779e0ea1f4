#include <cmath>
#include <vector>

#include "doctest.h"
#include "splx/errors.hpp"
#include "splx/interface.hpp"

using namespace splx;

namespace {

Event ev(double t, EventKind kind, long k) {
  Event e;
  e.t = t;
  e.kind = kind;
  e.k = k;
  return e;
}

}  // namespace

TEST_CASE("no events gives an empty log") {
  const auto log = track({}, 5, 10.0, 0.01);
  CHECK(log.records.empty());
  CHECK(log.K_eps == 0);
  CHECK(log.min_waiting == kNever);
}

TEST_CASE("single monotone passage") {
  const auto log = track({ev(1.0, EventKind::enter, 3), ev(2.5, EventKind::exit_high, 3)}, 3, 10.0, 0.01);
  REQUIRE(log.records.size() == 1);
  const auto& r = log.records[0];
  CHECK(r.k == 3);
  CHECK(r.excursions.empty());
  CHECK(r.t_hash == r.t_flat);
  CHECK(r.t_star == 2.5);
  CHECK(log.K_eps == 1);
}

TEST_CASE("excursion then passage is one record with one excursion") {
  const auto log = track({ev(1.0, EventKind::enter, 3), ev(1.5, EventKind::exit_low, 3),
                          ev(2.0, EventKind::enter, 3), ev(4.0, EventKind::exit_high, 3)},
                         3, 10.0, 0.01);
  REQUIRE(log.records.size() == 1);
  const auto& r = log.records[0];
  REQUIRE(r.excursions.size() == 1);
  CHECK(r.excursions[0].enter == 1.0);
  CHECK(r.excursions[0].exit == 1.5);
  CHECK(r.t_hash == 1.0);
  CHECK(r.t_flat == 2.0);
  CHECK(r.t_star == 4.0);
}

TEST_CASE("unfinished visit keeps the infinite sentinel") {
  const auto log = track({ev(1.0, EventKind::enter, 3), ev(2.0, EventKind::exit_high, 3),
                          ev(5.0, EventKind::enter, 4)},
                         3, 10.0, 0.1);
  REQUIRE(log.records.size() == 2);
  CHECK(std::isinf(log.records[1].t_star));
  CHECK_FALSE(log.records[1].complete());
  CHECK(log.K_eps == 1);
  CHECK(log.min_waiting == doctest::Approx(3.0));
  CHECK(log.d_emp() == doctest::Approx(0.15));
}

TEST_CASE("index functions and region measure") {
  const double eps = 0.1;
  const auto log = track({ev(1.0, EventKind::enter, 3), ev(2.0, EventKind::exit_high, 3),
                          ev(5.0, EventKind::enter, 4), ev(6.0, EventKind::exit_high, 4)},
                         3, 10.0, eps);
  CHECK(log.interface_index_at(0.5) == 3);
  CHECK(log.interface_index_at(2.5) == 4);
  CHECK(log.interface_index_at(7.0) == 5);
  CHECK(log.hash_index_at(0.5) == 3);
  CHECK(log.hash_index_at(1.5) == 4);
  CHECK(log.hash_index_at(5.5) == 5);
  CHECK(log.interface_region_measure() == doctest::Approx(2.0 * std::pow(eps, 3)));
}

TEST_CASE("malformed streams are fatal") {
  CHECK_THROWS_AS(track({ev(2.0, EventKind::enter, 3), ev(1.0, EventKind::exit_high, 3)}, 3, 10.0, 0.1),
                  InvariantViolation);
  CHECK_THROWS_AS(track({ev(1.0, EventKind::enter, 3), ev(2.0, EventKind::enter, 3)}, 3, 10.0, 0.1),
                  InvariantViolation);
  CHECK_THROWS_AS(track({ev(1.0, EventKind::exit_low, 3)}, 3, 10.0, 0.1), InvariantViolation);
  CHECK_THROWS_AS(track({ev(1.0, EventKind::enter, 4)}, 3, 10.0, 0.1), InvariantViolation);
}

TEST_CASE("waiting report marks pinned runs as not applicable") {
  WaitingSample s;
  s.epsilon = 0.01;
  s.beta = 1.0;
  s.p_star = 0.5;
  s.log = track({ev(1.0, EventKind::enter, 3), ev(2.0, EventKind::exit_high, 3)}, 3, 10.0, 0.01);
  const auto rep = waiting_scaling_report({s});
  REQUIRE(rep.entries.size() == 1);
  CHECK_FALSE(rep.entries[0].applicable);
  CHECK_FALSE(rep.warnings.empty());
}

TEST_CASE("waiting report recovers an exact power law") {
  std::vector<WaitingSample> runs;
  for (double eps : {0.04, 0.02, 0.01}) {
    WaitingSample s;
    s.epsilon = eps;
    s.beta = 1.0;
    s.p_star = 0.5;
    const double w = 0.3 / eps;
    s.log = track({ev(1.0, EventKind::enter, 3), ev(2.0, EventKind::exit_high, 3),
                   ev(2.0 + w, EventKind::enter, 4), ev(3.0 + w, EventKind::exit_high, 4)},
                  3, 10.0 * w, eps);
    runs.push_back(s);
  }
  const auto rep = waiting_scaling_report(runs);
  CHECK(rep.slope == doctest::Approx(-1.0).epsilon(1e-12));
  // min_waiting * b / p* with b = beta eps
  CHECK(rep.c_emp == doctest::Approx(0.3 / 0.5));
  CHECK(rep.all_above_bound);
}
