#include "splx/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "splx/errors.hpp"

namespace splx {

std::string to_string(BoundaryMode mode) {
  return mode == BoundaryMode::neumann ? "neumann" : "padded";
}

double LatticeConfig::eps() const {
  return epsilon > 0.0 ? epsilon : 1.0 / static_cast<double>(n_particles);
}

double LatticeConfig::t_fin() const { return tau_fin / (eps() * eps()); }

double LatticeConfig::max_dt() const { return cfl_safety / (4.0 * std::max(1.0, kappa)); }

long LatticeConfig::steps() const {
  const double h = dt > 0.0 ? dt : max_dt();
  return std::max<long>(1, static_cast<long>(std::ceil(t_fin() / h - 1e-9)));
}

double LatticeConfig::step_size() const { return t_fin() / static_cast<double>(steps()); }

long LatticeConfig::padding() const {
  if (bc == BoundaryMode::neumann) return 0;
  if (pad >= 0) return pad;
  return static_cast<long>(std::ceil(4.0 * std::sqrt(t_fin())));
}

long LatticeConfig::lo() const { return 1 - padding(); }
long LatticeConfig::hi() const { return n_particles + padding(); }

long LatticeConfig::stride() const {
  if (snapshot_stride > 0) return snapshot_stride;
  return std::max<long>(1, steps() / 500);
}

void validate(const LatticeConfig& c) {
  if (c.n_particles < 3) throw ConfigError("lattice.n must be at least 3");
  if (!(c.kappa > 0.0) || !std::isfinite(c.kappa)) throw ConfigError("lattice.kappa must be positive");
  if (c.epsilon < 0.0 || !std::isfinite(c.epsilon)) throw ConfigError("lattice.epsilon must be >= 0");
  if (!(c.tau_fin > 0.0) || !std::isfinite(c.tau_fin)) throw ConfigError("lattice.tau_fin must be positive");
  if (!(c.cfl_safety > 0.0 && c.cfl_safety <= 1.0)) throw ConfigError("lattice.cfl_safety must lie in (0,1]");
  if (c.dt < 0.0 || !std::isfinite(c.dt)) throw ConfigError("lattice.dt must be >= 0");
  if (c.dt > c.max_dt()) {
    throw ConfigError("lattice.dt = " + std::to_string(c.dt) + " exceeds the stability bound " +
                      std::to_string(c.max_dt()));
  }
  if (c.snapshot_stride < 0) throw ConfigError("lattice.snapshot_stride must be >= 0");
}

double MacroProfile::operator()(double xi) const {
  double v = level + slope_left * std::min(xi - xi_ini, 0.0) +
             slope_right * std::max(xi - xi_ini, 0.0);
  for (const auto& b : bumps) {
    const double z = (xi - b.center) / b.width;
    v += b.amplitude * std::exp(-z * z);
  }
  for (const auto& r : ramps) v += r.amplitude * std::tanh((xi - r.center) / r.width);
  return v;
}

namespace {

long first_minus_site(const MacroProfile& m, double eps) {
  return static_cast<long>(std::ceil(m.xi_ini / eps - 1e-9));
}

}  // namespace

std::vector<double> sample_initial(const InitialDataSpec& spec, const LatticeConfig& config) {
  const long n = config.n_particles;
  const double eps = config.eps();
  std::vector<double> u(static_cast<std::size_t>(n));
  switch (spec.variant) {
    case InitVariant::macroscopic: {
      const long k0 = first_minus_site(spec.macro, eps);
      for (long j = 1; j <= n; ++j) {
        const double p = spec.macro(eps * static_cast<double>(j));
        u[static_cast<std::size_t>(j - 1)] = j < k0 ? p + 1.0 : p - 1.0;
      }
      break;
    }
    case InitVariant::arctan: {
      const auto& a = spec.arctan;
      for (long j = 1; j <= n; ++j) {
        const double x = eps * static_cast<double>(j);
        u[static_cast<std::size_t>(j - 1)] = j < a.j_star
                                                 ? a.c_plus + a.d_plus * std::atan(x + a.e_plus)
                                                 : a.c_minus + a.d_minus * std::atan(x + a.e_minus);
      }
      break;
    }
    case InitVariant::raw: {
      if (static_cast<long>(spec.raw.size()) != n) {
        throw ConfigError("raw initial data must have exactly N values");
      }
      u = spec.raw;
      break;
    }
  }
  return u;
}

Certificates compute_certificates(const std::vector<double>& u, const PotentialParams& params,
                                  double eps, long k0) {
  const long n = static_cast<long>(u.size());
  std::vector<double> p(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) p[i] = phi_prime(u[i], params);
  auto at = [&](long j) { return p[static_cast<std::size_t>(std::clamp<long>(j, 1, n) - 1)]; };
  Certificates c;
  c.k0 = k0;
  for (long j = 1; j <= n; ++j) {
    c.alpha = std::max(c.alpha, std::abs(at(j)));
    if (j < n) c.alpha = std::max(c.alpha, std::abs(at(j + 1) - at(j)) / eps);
    const double lap = at(j + 1) + at(j - 1) - 2.0 * at(j);
    if (j != k0) c.alpha = std::max(c.alpha, std::abs(lap) / (eps * eps));
    else c.beta = std::max(c.beta, std::abs(lap) / eps);
    if (j < k0) {
      c.b = std::max(c.b, (at(j) - params.p_star) / static_cast<double>(k0 - j));
    } else if (at(j) > params.p_star) {
      c.b = kNever;
    }
  }
  c.beta = std::max(c.beta, c.b / eps);
  return c;
}

LatticeState init(const InitialDataSpec& spec, const LatticeConfig& config,
                  Certificates* certificates) {
  validate(config);
  const auto params = derive_params(config.kappa);
  const auto sites = sample_initial(spec, config);
  const long n = config.n_particles;
  const double us = params.u_star, uss = params.u_star_star;

  long k0 = 0;
  if (spec.variant == InitVariant::macroscopic) {
    k0 = first_minus_site(spec.macro, config.eps());
  } else if (spec.variant == InitVariant::arctan) {
    k0 = spec.arctan.j_star;
  } else {
    k0 = n + 1;
    for (long j = 1; j <= n; ++j) {
      if (sites[static_cast<std::size_t>(j - 1)] <= -us) {
        k0 = j;
        break;
      }
    }
  }
  if (k0 < 1 || k0 > n) {
    throw InvariantViolation("initial data has no minus-phase particle inside the lattice", k0, 0.0);
  }
  for (long j = 1; j <= n; ++j) {
    const double u = sites[static_cast<std::size_t>(j - 1)];
    if (!std::isfinite(u)) throw InvariantViolation("non-finite initial value", j, 0.0);
    if (u > -us && u < us) {
      throw InvariantViolation("initial particle inside the spinodal region", j, 0.0);
    }
    if (j < k0 && !(u > us)) {
      throw InvariantViolation("particle left of the interface is not in the plus phase", j, 0.0);
    }
    if (j >= k0 && !(u > -uss && u <= -us)) {
      throw InvariantViolation("particle right of the interface is not in the minus phase", j, 0.0);
    }
    if (j > k0 && u == -us) {
      throw InvariantViolation("particle right of the interface sits on the threshold", j, 0.0);
    }
  }

  const Certificates cert = compute_certificates(sites, params, config.eps(), k0);
  if (spec.alpha > 0.0 && cert.alpha > spec.alpha * (1.0 + 1e-12)) {
    throw DomainError("initial data violates the alpha certificate: need " +
                      std::to_string(cert.alpha));
  }
  if (spec.beta > 0.0 && cert.beta > spec.beta * (1.0 + 1e-12)) {
    throw DomainError("initial data violates the beta certificate: need " +
                      std::to_string(cert.beta));
  }
  if (certificates) *certificates = cert;

  LatticeState s;
  s.t = 0.0;
  s.lo = config.lo();
  s.k = k0;
  s.inside = false;
  const long hi = config.hi();
  s.u.resize(static_cast<std::size_t>(hi - s.lo + 1));
  for (long j = s.lo; j <= hi; ++j) {
    s.u[static_cast<std::size_t>(j - s.lo)] =
        sites[static_cast<std::size_t>(std::clamp<long>(j, 1, n) - 1)];
  }
  s.p.resize(s.u.size());
  for (std::size_t i = 0; i < s.u.size(); ++i) s.p[i] = phi_prime(s.u[i], params);
  return s;
}

Integrator::Integrator(const PotentialParams& params, double u_upper, double slack)
    : params_(params), u_upper_(u_upper), slack_(slack) {}

void Integrator::recompute_p(LatticeState& s) const {
  for (std::size_t i = 0; i < s.u.size(); ++i) s.p[i] = phi_prime(s.u[i], params_);
}

void Integrator::step(LatticeState& s, double dt, std::vector<Event>* events) {
  const std::size_t m = s.u.size();
  const double us = params_.u_star, ps = params_.p_star, uss = params_.u_star_star;
  const double kappa = params_.kappa;
  flux_.resize(m);
  const double t_end = s.t + dt;
  double tc = s.t;
  double remaining = dt;
  for (int guard = 0; remaining > 0.0; ++guard) {
    if (guard > 64) throw InvariantViolation("event loop does not advance", s.k, tc);
    const long kk = s.k - s.lo;
    if (kk < 0 || kk >= static_cast<long>(m)) {
      throw InvariantViolation("interface reached the end of the lattice", s.k, tc);
    }
    double* u = s.u.data();
    double* p = s.p.data();
    double* f = flux_.data();
    if (m == 1) {
      f[0] = 0.0;
    } else {
      f[0] = p[1] - p[0];
      for (std::size_t i = 1; i + 1 < m; ++i) f[i] = p[i + 1] + p[i - 1] - 2.0 * p[i];
      f[m - 1] = p[m - 2] - p[m - 1];
    }

    const auto ik = static_cast<std::size_t>(kk);
    const double uk = u[ik], fk = f[ik];
    double h = remaining;
    bool has_event = false;
    EventKind kind = EventKind::enter;
    if (!s.inside) {
      if (fk > 0.0 && uk + h * fk >= -us) {
        h = std::max(0.0, (-us - uk) / fk);
        kind = EventKind::enter;
        has_event = true;
      }
    } else if (fk > 0.0 && uk + h * fk >= us) {
      h = std::max(0.0, (us - uk) / fk);
      kind = EventKind::exit_high;
      has_event = true;
    } else if (fk < 0.0 && uk + h * fk <= -us) {
      h = std::max(0.0, (-us - uk) / fk);
      kind = EventKind::exit_low;
      has_event = true;
    }
    h = std::min(h, remaining);

    // Update with the phase of every site known in advance.
    double plus_min = kNever, plus_max = -kNever, minus_min = kNever, minus_max = -kNever;
    for (std::size_t i = 0; i < ik; ++i) {
      u[i] += h * f[i];
      p[i] = u[i] - 1.0;
      plus_min = std::min(plus_min, u[i]);
      plus_max = std::max(plus_max, u[i]);
    }
    u[ik] += h * f[ik];
    p[ik] = s.inside ? -kappa * u[ik] : u[ik] + 1.0;
    for (std::size_t i = ik + 1; i < m; ++i) {
      u[i] += h * f[i];
      p[i] = u[i] + 1.0;
      minus_min = std::min(minus_min, u[i]);
      minus_max = std::max(minus_max, u[i]);
    }
    tc += h;
    remaining -= h;

    auto locate = [&](auto pred) {
      for (std::size_t i = 0; i < m; ++i) {
        if (pred(i, u[i])) return s.lo + static_cast<long>(i);
      }
      return s.k;
    };
    if (ik > 0) {
      if (!(plus_min >= us)) {
        throw InvariantViolation("plus-phase particle entered the spinodal region",
                                 locate([&](std::size_t i, double v) { return i < ik && v < us; }), tc);
      }
      if (plus_max > u_upper_ + slack_) {
        throw InvariantViolation("upper bound exceeded",
                                 locate([&](std::size_t i, double v) { return i < ik && v > u_upper_ + slack_; }), tc);
      }
    }
    if (ik + 1 < m) {
      if (!(minus_max < -us)) {
        throw InvariantViolation("second particle reached the spinodal region",
                                 locate([&](std::size_t i, double v) { return i > ik && v >= -us; }), tc);
      }
      if (minus_min < -uss - slack_) {
        throw InvariantViolation("lower bound exceeded",
                                 locate([&](std::size_t i, double v) { return i > ik && v < -uss - slack_; }), tc);
      }
    }
    if (!std::isfinite(u[ik]) || u[ik] < -uss - slack_) {
      throw InvariantViolation("interface particle below the lower bound", s.k, tc);
    }

    if (has_event) {
      Event ev;
      ev.t = tc;
      ev.kind = kind;
      ev.k = s.k;
      ev.u_left = ik > 0 ? u[ik - 1] : kNever;
      ev.lap_p = fk;
      switch (kind) {
        case EventKind::enter:
          u[ik] = -us;
          p[ik] = ps;
          s.inside = true;
          break;
        case EventKind::exit_low:
          u[ik] = -us;
          p[ik] = ps;
          s.inside = false;
          break;
        case EventKind::exit_high:
          u[ik] = us;
          p[ik] = -ps;
          s.inside = false;
          s.k += 1;
          break;
      }
      if (events) events->push_back(ev);
      if (on_event) {
        const double saved = s.t;
        s.t = tc;
        on_event(s, ev);
        s.t = saved;
      }
    } else if (s.inside && !(u[ik] > -us && u[ik] < us)) {
      throw InvariantViolation("spinodal particle escaped without an event", s.k, tc);
    } else if (!s.inside && !(u[ik] < -us)) {
      throw InvariantViolation("interface particle crossed without an event", s.k, tc);
    }
  }
  s.t = t_end;
}

LatticeState step(const LatticeState& state, double dt, const PotentialParams& params) {
  double umax = params.u_star_star;
  for (double u : state.u) umax = std::max(umax, u);
  Integrator integ(params, umax);
  LatticeState next = state;
  integ.step(next, dt, nullptr);
  return next;
}

std::size_t Trajectory::sites() const {
  return snapshots.empty() ? 0 : snapshots.front().u.size();
}

std::vector<double> Trajectory::p_of(const Snapshot& s) const {
  const auto params = derive_params(kappa);
  std::vector<double> p(s.u.size());
  for (std::size_t i = 0; i < s.u.size(); ++i) p[i] = phi_prime(s.u[i], params);
  return p;
}

const Snapshot& Trajectory::exact(double t) const {
  auto it = std::lower_bound(snapshots.begin(), snapshots.end(), t,
                             [](const Snapshot& s, double v) { return s.t < v; });
  if (it == snapshots.end() || it->t != t) {
    throw DomainError("no stored state at t = " + std::to_string(t));
  }
  return *it;
}

std::vector<std::size_t> Trajectory::regular_indices() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    if (snapshots[i].kind == SnapshotKind::regular) idx.push_back(i);
  }
  return idx;
}

SimulationResult simulate(const LatticeConfig& config, const InitialDataSpec& spec,
                          const std::vector<StepObserver>& observers) {
  validate(config);
  const auto params = derive_params(config.kappa);
  SimulationResult res;
  LatticeState state = init(spec, config, &res.certificates);
  double umax = params.u_star_star;
  for (double u : state.u) umax = std::max(umax, u);

  Trajectory& traj = res.trajectory;
  traj.n_particles = config.n_particles;
  traj.lo = state.lo;
  traj.kappa = config.kappa;
  traj.epsilon = config.eps();
  traj.dt = config.step_size();
  traj.t_fin = config.t_fin();
  traj.bc = config.bc;

  auto store = [&](const LatticeState& s, SnapshotKind kind, EventKind ev) {
    Snapshot snap;
    snap.t = s.t;
    snap.k = s.k;
    snap.inside = s.inside;
    snap.kind = kind;
    snap.event = ev;
    snap.u = s.u;
    traj.snapshots.push_back(std::move(snap));
  };

  Integrator integ(params, umax);
  integ.on_event = [&](const LatticeState& s, const Event& ev) {
    store(s, SnapshotKind::event, ev.kind);
  };

  const double mass0 = std::accumulate(state.u.begin(), state.u.end(), 0.0);
  const long steps = config.steps();
  const double dt = config.step_size();
  const long stride = config.stride();
  store(state, SnapshotKind::regular, EventKind::enter);
  for (const auto& obs : observers) obs.fn(state);

  Tracker tracker(state.k);
  std::size_t seen = 0;
  for (long n = 1; n <= steps; ++n) {
    integ.step(state, dt, &res.events);
    state.t = static_cast<double>(n) * dt;
    for (; seen < res.events.size(); ++seen) tracker.push(res.events[seen]);
    if (n % stride == 0 || n == steps) store(state, SnapshotKind::regular, EventKind::enter);
    for (const auto& obs : observers) {
      if (obs.every > 0 && n % obs.every == 0) obs.fn(state);
    }
  }
  res.steps = steps;
  res.log = tracker.finish(config.t_fin(), config.eps());
  const double mass1 = std::accumulate(state.u.begin(), state.u.end(), 0.0);
  res.mass_drift = std::abs(mass1 - mass0);
  return res;
}

long StructureReport::total() const {
  return multiple_spinodal + bound_violations + membership_violations + entrance_violations +
         exit_violations + ordering_violations + majorant_violations;
}

StructureReport verify_structure(const SimulationResult& run, double slack) {
  const auto& traj = run.trajectory;
  const auto params = derive_params(traj.kappa);
  const double us = params.u_star, uss = params.u_star_star, ps = params.p_star;
  StructureReport rep;
  if (traj.snapshots.empty()) return rep;
  double umax = uss;
  for (double u : traj.snapshots.front().u) umax = std::max(umax, u);
  const double b = run.certificates.b;

  for (const auto& snap : traj.snapshots) {
    ++rep.snapshots;
    long spinodal = 0;
    bool bound_bad = false, member_bad = false, major_bad = false;
    for (std::size_t i = 0; i < snap.u.size(); ++i) {
      const long j = traj.lo + static_cast<long>(i);
      const double u = snap.u[i];
      if (u > -us && u < us) ++spinodal;
      if (u < -uss - slack || u > umax + slack) bound_bad = true;
      if (j < snap.k && !(u >= us)) member_bad = true;
      if (j > snap.k && !(u > -uss - slack && u < -us)) member_bad = true;
      if (j == snap.k && !(u > -uss - slack && u <= us)) member_bad = true;
      const double p = phi_prime(u, params);
      const double bound = ps + b * static_cast<double>(std::max<long>(snap.k - j, 0));
      if (p > bound + slack) {
        major_bad = true;
        rep.max_majorant_excess = std::max(rep.max_majorant_excess, p - bound);
      }
    }
    if (spinodal > 1) ++rep.multiple_spinodal;
    if (bound_bad) ++rep.bound_violations;
    if (member_bad) ++rep.membership_violations;
    if (major_bad) ++rep.majorant_violations;
  }
  for (const auto& ev : run.events) {
    if (ev.kind == EventKind::enter && !(ev.u_left > uss)) ++rep.entrance_violations;
    if (ev.kind == EventKind::exit_high && !(ev.lap_p > 0.0)) ++rep.exit_violations;
  }
  double prev_star = 0.0;
  for (const auto& r : run.log.records) {
    if (!(prev_star <= r.t_hash && r.t_hash <= r.t_flat && r.t_flat <= r.t_star)) {
      // an unfinished visit outside the spinodal region has t_flat = t_star = never
      if (!(r.t_flat == kNever && r.t_star == kNever && prev_star <= r.t_hash)) {
        ++rep.ordering_violations;
      }
    }
    for (const auto& e : r.excursions) {
      if (!(e.enter >= r.t_hash && e.exit > e.enter && e.exit <= r.t_flat)) ++rep.ordering_violations;
    }
    prev_star = r.t_star;
  }
  return rep;
}

}  // namespace splx
