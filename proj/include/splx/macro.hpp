#pragma once

#include <string>
#include <vector>

#include "splx/fluctuations.hpp"
#include "splx/interface.hpp"
#include "splx/lattice.hpp"
#include "splx/stefan.hpp"

namespace splx {

/// j with xi = eps (j + zeta), zeta in (-1/2, 1/2].
long integer_part(double xi, double epsilon);

struct MacroGrid {
  long n_xi = 400;     // cell midpoints of (eps/2, eps (N + 1/2)]
  long max_tau = 200;  // stored regular states, subsampled
};

/// Piecewise constant rescaled fields on a (tau, xi) sample grid; rows are
/// tau samples.
struct MacroFields {
  double epsilon = 0.0;
  double tau_fin = 0.0;
  double p_star = 0.0;
  std::vector<double> tau, xi;
  std::vector<std::size_t> snapshot;   // trajectory index of each tau row
  std::vector<std::vector<double>> P, U, M;
  std::vector<std::vector<double>> Q, R_reg, R_res, R_neg;  // empty without a decomposition
  std::vector<double> Xi_star, Xi_hash;
  std::vector<double> trace_raw;  // P_eps(tau, Xi_star(tau))
  std::vector<double> trace_reg;  // (Q_eps - R_reg)(tau, Xi_star(tau))
  double gamma_measure = 0.0;     // |Gamma_eps|
  double formula_residual = 0.0;  // sup |P - Q + R_reg + R_neg + R_res|
  bool decomposed = false;

  /// Step-function evaluation from the transition log.
  TransitionLog log;
  double xi_star_at(double tau) const;
  double xi_hash_at(double tau) const;
};

MacroFields rescale(const Trajectory& traj, const TransitionLog& log,
                    const FluctuationEngine* engine = nullptr, const MacroGrid& grid = {});

/// P_eps at an arbitrary (tau, xi) from the nearest stored state at or
/// before tau; DomainError outside the stored data.
double sample_field(const Trajectory& traj, double tau, double xi);

struct RegimeBin {
  double tau0 = 0.0, tau1 = 0.0;
  Regime regime = Regime::pinned;
};

struct RegimeSummary {
  std::vector<RegimeBin> bins;
  bool advance_then_pin = false;  // moving bins, then at least 3 pinned bins up to tau_fin
  bool depinning = false;         // at least 2 pinned bins, later at least 2 moving bins
  double pin_time = kNever;       // start of the final pinned stretch
  double depin_time = kNever;     // first moving bin after the initial pinned stretch
};

/// Classifies bins of [0, tau_fin] by finite differences of Xi_star.
RegimeSummary detect_regimes(const TransitionLog& log, double tau_fin, long bins = 20);

struct FlowRuleReport {
  double moving_dev_raw = 0.0;   // sup over moving bins of |trace_raw - p*|
  double moving_dev_reg = 0.0;   // same for the regularised trace
  double pinned_max_raw = -kNever;  // sup of trace_raw over pinned bins
  double pinned_max_reg = -kNever;
  bool pinned_constant = true;   // Xi_star constant inside every pinned bin
  long moving_samples = 0, pinned_samples = 0;
};

FlowRuleReport flow_rule_report(const MacroFields& fields, const RegimeSummary& regimes);

struct ConvergenceEntry {
  double epsilon = 0.0;
  long n = 0;
  double field_error = 0.0;      // sup_xi |P_eps(tau_fin) - P(tau_fin)|
  double interface_error = 0.0;  // sup_tau |Xi_star - Xi|
  double flow_rule_deviation = 0.0;
  double gamma_measure = 0.0;
  bool gamma_bound = false;      // |Gamma_eps| <= eps tau_fin
};

struct ConvergenceReport {
  std::vector<ConvergenceEntry> entries;  // increasing N
  bool field_monotone = false;
  bool interface_monotone = false;
  std::string to_json() const;
  std::string curves_csv;  // tau, Xi_stefan, Xi_star per run
};

struct CompareInput {
  const Trajectory* traj = nullptr;
  const TransitionLog* log = nullptr;
  const MacroFields* fields = nullptr;  // optional, for the flow-rule deviation
  std::uint64_t data_hash = 0;
};

/// Throws DomainError when data hashes differ from the Stefan one.
ConvergenceReport compare(const std::vector<CompareInput>& runs, const StefanSolution& stefan,
                          std::uint64_t stefan_hash = 0, long tau_points = 4000, long xi_points = 1000);

}  // namespace splx
