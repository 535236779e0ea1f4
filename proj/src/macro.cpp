#include "splx/macro.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "splx/errors.hpp"
#include "splx/potential.hpp"

namespace splx {

long integer_part(double xi, double epsilon) {
  return static_cast<long>(std::ceil(xi / epsilon - 0.5));
}

double MacroFields::xi_star_at(double tau) const {
  return epsilon * static_cast<double>(log.interface_index_at(tau / (epsilon * epsilon)));
}

double MacroFields::xi_hash_at(double tau) const {
  return epsilon * static_cast<double>(log.hash_index_at(tau / (epsilon * epsilon)));
}

MacroFields rescale(const Trajectory& traj, const TransitionLog& log,
                    const FluctuationEngine* engine, const MacroGrid& grid) {
  if (traj.snapshots.empty()) throw DomainError("empty trajectory");
  MacroFields f;
  f.epsilon = traj.epsilon;
  f.tau_fin = traj.t_fin * traj.epsilon * traj.epsilon;
  f.p_star = derive_params(traj.kappa).p_star;
  f.log = log;
  f.decomposed = engine != nullptr;
  const double eps = f.epsilon, e2 = eps * eps;
  const long nx = std::max(1L, grid.n_xi);
  const long hi = traj.lo + static_cast<long>(traj.sites()) - 1;
  const double a = eps * (static_cast<double>(std::max(traj.lo, 1L)) - 0.5);
  const double b = eps * (static_cast<double>(std::min(hi, traj.n_particles)) + 0.5);
  for (long i = 0; i < nx; ++i)
    f.xi.push_back(a + (b - a) * (static_cast<double>(i) + 0.5) / static_cast<double>(nx));
  std::vector<long> jx;
  for (double x : f.xi) {
    const long j = integer_part(x, eps);
    if (j < traj.lo || j > hi) throw DomainError("xi outside the stored window");
    jx.push_back(j);
  }
  auto reg = traj.regular_indices();
  const long cap = std::max(2L, grid.max_tau);
  std::vector<std::size_t> rows;
  if (static_cast<long>(reg.size()) <= cap) {
    rows = reg;
  } else {
    const double step = static_cast<double>(reg.size() - 1) / static_cast<double>(cap - 1);
    for (long i = 0; i < cap; ++i) {
      const auto n = reg[static_cast<std::size_t>(std::llround(step * static_cast<double>(i)))];
      if (rows.empty() || rows.back() != n) rows.push_back(n);
    }
  }
  auto pick = [&](const std::vector<double>& v) {
    std::vector<double> out;
    out.reserve(jx.size());
    for (long j : jx) out.push_back(v[static_cast<std::size_t>(j - traj.lo)]);
    return out;
  };
  f.gamma_measure = log.interface_region_measure();
  for (std::size_t n : rows) {
    const auto& s = traj.snapshots[n];
    const double tau = s.t * e2;
    f.tau.push_back(tau);
    f.snapshot.push_back(n);
    const auto p = traj.p_of(s);
    f.P.push_back(pick(p));
    f.U.push_back(pick(s.u));
    const double xs = f.xi_star_at(tau), xh = f.xi_hash_at(tau);
    f.Xi_star.push_back(xs);
    f.Xi_hash.push_back(xh);
    std::vector<double> m;
    for (double x : f.xi) m.push_back(x > xh ? -1.0 : (x < xs ? 1.0 : 0.0));
    f.M.push_back(std::move(m));
    const long k = log.interface_index_at(s.t);
    const bool k_in = k >= traj.lo && k <= hi;
    f.trace_raw.push_back(k_in ? p[static_cast<std::size_t>(k - traj.lo)] : f.p_star);
    if (engine) {
      const auto a = engine->aggregates(n);
      for (std::size_t j = 0; j < p.size(); ++j)
        f.formula_residual = std::max(
            f.formula_residual, std::abs(p[j] - (a.Q[j] - a.R_reg[j] - a.R_neg[j] - a.R_res[j])));
      f.Q.push_back(pick(a.Q));
      f.R_reg.push_back(pick(a.R_reg));
      f.R_res.push_back(pick(a.R_res));
      f.R_neg.push_back(pick(a.R_neg));
      f.trace_reg.push_back(k_in ? a.Q[static_cast<std::size_t>(k - traj.lo)] -
                                       a.R_reg[static_cast<std::size_t>(k - traj.lo)]
                                 : f.p_star);
    }
  }
  return f;
}

double sample_field(const Trajectory& traj, double tau, double xi) {
  const double e2 = traj.epsilon * traj.epsilon;
  const double t = tau / e2;
  if (traj.snapshots.empty() || t < 0.0 || t > traj.t_fin * (1.0 + 1e-12))
    throw DomainError("tau outside stored data");
  const long j = integer_part(xi, traj.epsilon);
  const long hi = traj.lo + static_cast<long>(traj.sites()) - 1;
  if (j < traj.lo || j > hi) throw DomainError("xi outside stored data");
  auto it = std::upper_bound(traj.snapshots.begin(), traj.snapshots.end(), t * (1.0 + 1e-12),
                             [](double v, const Snapshot& s) { return v < s.t; });
  if (it == traj.snapshots.begin()) throw DomainError("tau before first stored state");
  --it;
  return traj.p_of(*it)[static_cast<std::size_t>(j - traj.lo)];
}

RegimeSummary detect_regimes(const TransitionLog& log, double tau_fin, long bins) {
  RegimeSummary r;
  bins = std::max(1L, bins);
  const double e = log.epsilon, e2 = e * e;
  auto xs = [&](double tau) {
    return e * static_cast<double>(log.interface_index_at(std::min(tau, tau_fin) / e2));
  };
  for (long i = 0; i < bins; ++i) {
    RegimeBin b;
    b.tau0 = tau_fin * static_cast<double>(i) / static_cast<double>(bins);
    b.tau1 = tau_fin * static_cast<double>(i + 1) / static_cast<double>(bins);
    b.regime = xs(b.tau1) - xs(b.tau0) > 0.0 ? Regime::moving : Regime::pinned;
    r.bins.push_back(b);
  }
  long last_moving = -1, first_moving = -1, moving = 0;
  for (long i = 0; i < bins; ++i) {
    if (r.bins[static_cast<std::size_t>(i)].regime == Regime::moving) {
      if (first_moving < 0) first_moving = i;
      last_moving = i;
      ++moving;
    }
  }
  double last_star = kNever, first_star = kNever;
  for (const auto& rec : log.records) {
    if (!rec.complete() || rec.t_star > log.t_fin) continue;
    const double tau = rec.t_star * e2;
    if (first_star == kNever) first_star = tau;
    last_star = tau;
  }
  if (last_moving >= 0 && bins - 1 - last_moving >= 3) {
    r.advance_then_pin = true;
    r.pin_time = last_star;
  }
  if (first_moving >= 2 && moving >= 2) {
    r.depinning = true;
    r.depin_time = first_star;
  }
  return r;
}

FlowRuleReport flow_rule_report(const MacroFields& f, const RegimeSummary& regimes) {
  FlowRuleReport rep;
  for (std::size_t n = 0; n < f.tau.size(); ++n) {
    const double tau = f.tau[n];
    const RegimeBin* bin = nullptr;
    for (const auto& b : regimes.bins)
      if (tau >= b.tau0 && (tau < b.tau1 || (b.tau1 >= f.tau_fin && tau <= b.tau1))) bin = &b;
    if (!bin) continue;
    if (bin->regime == Regime::moving) {
      ++rep.moving_samples;
      rep.moving_dev_raw = std::max(rep.moving_dev_raw, std::abs(f.trace_raw[n] - f.p_star));
      if (!f.trace_reg.empty())
        rep.moving_dev_reg = std::max(rep.moving_dev_reg, std::abs(f.trace_reg[n] - f.p_star));
    } else {
      ++rep.pinned_samples;
      rep.pinned_max_raw = std::max(rep.pinned_max_raw, f.trace_raw[n]);
      if (!f.trace_reg.empty()) rep.pinned_max_reg = std::max(rep.pinned_max_reg, f.trace_reg[n]);
    }
  }
  for (const auto& b : regimes.bins)
    if (b.regime == Regime::pinned && f.xi_star_at(b.tau0) != f.xi_star_at(std::min(b.tau1, f.tau_fin)))
      rep.pinned_constant = false;
  return rep;
}

ConvergenceReport compare(const std::vector<CompareInput>& runs, const StefanSolution& stefan,
                          std::uint64_t stefan_hash, long tau_points, long xi_points) {
  ConvergenceReport rep;
  std::ostringstream csv;
  csv.precision(10);
  csv << "run,N,tau,Xi_stefan,Xi_star\n";
  for (const auto& in : runs) {
    if (!in.traj || !in.log) throw DomainError("missing run data");
    if (stefan_hash != 0 && in.data_hash != 0 && in.data_hash != stefan_hash)
      throw DomainError("initial data hash mismatch");
    const auto& tr = *in.traj;
    const double eps = tr.epsilon, e2 = eps * eps;
    const double tau_fin = tr.t_fin * e2;
    if (std::abs(tau_fin - stefan.tau_fin) > 1e-9 * std::max(1.0, tau_fin))
      throw DomainError("tau_fin differs from the reference solution");
    ConvergenceEntry e;
    e.epsilon = eps;
    e.n = tr.n_particles;
    for (long i = 0; i <= tau_points; ++i) {
      const double tau = tau_fin * static_cast<double>(i) / static_cast<double>(tau_points);
      const double xl = eps * static_cast<double>(in.log->interface_index_at(tau / e2));
      const double xs = stefan.interface_at(tau);
      e.interface_error = std::max(e.interface_error, std::abs(xl - xs));
      if (i % std::max(1L, tau_points / 400) == 0)
        csv << rep.entries.size() << "," << e.n << "," << tau << "," << xs << "," << xl << "\n";
    }
    const auto pl = tr.p_of(tr.snapshots.back());
    const std::size_t last = stefan.P.size() - 1;
    for (long i = 1; i <= xi_points; ++i) {
      const double x = static_cast<double>(i) / static_cast<double>(xi_points);
      long j = integer_part(x, eps);
      j = std::clamp(j, tr.lo, tr.lo + static_cast<long>(tr.sites()) - 1);
      e.field_error = std::max(e.field_error,
                               std::abs(pl[static_cast<std::size_t>(j - tr.lo)] - stefan.field_at(last, x)));
    }
    e.gamma_measure = in.log->interface_region_measure();
    e.gamma_bound = e.gamma_measure <= eps * tau_fin;
    if (in.fields) {
      const auto reg = detect_regimes(*in.log, tau_fin);
      const auto fr = flow_rule_report(*in.fields, reg);
      e.flow_rule_deviation = in.fields->decomposed ? fr.moving_dev_reg : fr.moving_dev_raw;
    }
    rep.entries.push_back(e);
  }
  std::sort(rep.entries.begin(), rep.entries.end(),
            [](const ConvergenceEntry& a, const ConvergenceEntry& b) { return a.n < b.n; });
  rep.field_monotone = rep.interface_monotone = rep.entries.size() >= 2;
  for (std::size_t i = 1; i < rep.entries.size(); ++i) {
    if (!(rep.entries[i].field_error < rep.entries[i - 1].field_error)) rep.field_monotone = false;
    if (!(rep.entries[i].interface_error < rep.entries[i - 1].interface_error))
      rep.interface_monotone = false;
  }
  rep.curves_csv = csv.str();
  return rep;
}

std::string ConvergenceReport::to_json() const {
  nlohmann::json j;
  for (const auto& e : entries) {
    j["N"].push_back(e.n);
    j["epsilons"].push_back(e.epsilon);
    j["field_errors"].push_back(e.field_error);
    j["interface_errors"].push_back(e.interface_error);
    j["flow_rule_deviation"].push_back(e.flow_rule_deviation);
    j["gamma_measure"].push_back(e.gamma_measure);
  }
  j["field_monotone"] = field_monotone;
  j["interface_monotone"] = interface_monotone;
  return j.dump(2);
}

}  // namespace splx
