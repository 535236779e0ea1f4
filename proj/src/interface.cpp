#include "splx/interface.hpp"

#include <algorithm>
#include <cmath>

#include "splx/errors.hpp"

namespace splx {

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::enter: return "enter";
    case EventKind::exit_low: return "exit_low";
    case EventKind::exit_high: return "exit_high";
  }
  return "unknown";
}

EventKind event_kind_from_string(const std::string& name) {
  if (name == "enter") return EventKind::enter;
  if (name == "exit_low") return EventKind::exit_low;
  if (name == "exit_high") return EventKind::exit_high;
  throw DomainError("unknown event kind: " + name);
}

double TransitionLog::d_emp() const {
  return min_waiting == kNever ? kNever : 0.5 * min_waiting * epsilon;
}

double TransitionLog::interface_region_measure() const {
  double total = 0.0;
  for (const auto& r : records) {
    if (r.t_hash > t_fin) continue;
    total += std::min(r.t_star, t_fin) - r.t_hash;
  }
  return total * epsilon * epsilon * epsilon;
}

long TransitionLog::interface_index_at(double t) const {
  long k = k_initial;
  for (const auto& r : records) {
    if (r.t_star <= t) k = r.k + 1;
  }
  return k;
}

long TransitionLog::hash_index_at(double t) const {
  long k = k_initial;
  for (const auto& r : records) {
    if (r.t_hash <= t) k = r.k + 1;
  }
  return k;
}

void Tracker::push(const Event& ev) {
  if (ev.t < last_t_) {
    throw InvariantViolation("event stream out of time order", ev.k, ev.t);
  }
  last_t_ = ev.t;
  switch (ev.kind) {
    case EventKind::enter: {
      if (inside_) {
        throw InvariantViolation("second spinodal entrance without exit", ev.k, ev.t);
      }
      if (!open_) {
        if (ev.k != k_next_) {
          throw InvariantViolation("entrance at unexpected site", ev.k, ev.t);
        }
        TransitionRecord rec;
        rec.k = ev.k;
        rec.t_hash = ev.t;
        records_.push_back(rec);
        open_ = true;
      } else if (ev.k != records_.back().k) {
        throw InvariantViolation("entrance of a second particle", ev.k, ev.t);
      }
      inside_ = true;
      last_enter_ = ev.t;
      break;
    }
    case EventKind::exit_low: {
      if (!inside_ || records_.back().k != ev.k) {
        throw InvariantViolation("excursion exit without entrance", ev.k, ev.t);
      }
      records_.back().excursions.push_back({last_enter_, ev.t});
      inside_ = false;
      break;
    }
    case EventKind::exit_high: {
      if (!inside_ || records_.back().k != ev.k) {
        throw InvariantViolation("phase transition without entrance", ev.k, ev.t);
      }
      auto& rec = records_.back();
      rec.t_flat = last_enter_;
      rec.t_star = ev.t;
      inside_ = false;
      open_ = false;
      k_next_ = ev.k + 1;
      break;
    }
  }
}

TransitionLog Tracker::finish(double t_fin, double epsilon) const {
  TransitionLog log;
  log.records = records_;
  log.epsilon = epsilon;
  log.t_fin = t_fin;
  log.k_initial = k_initial_;
  if (open_ && inside_) log.records.back().t_flat = last_enter_;
  for (const auto& r : log.records) {
    if (r.complete() && r.t_star <= t_fin) ++log.K_eps;
  }
  for (std::size_t i = 0; i + 1 < log.records.size(); ++i) {
    const auto& a = log.records[i];
    const auto& b = log.records[i + 1];
    if (a.complete()) log.min_waiting = std::min(log.min_waiting, b.t_hash - a.t_star);
  }
  return log;
}

TransitionLog track(const std::vector<Event>& events, long k_initial, double t_fin,
                    double epsilon) {
  Tracker tracker(k_initial);
  for (const auto& ev : events) tracker.push(ev);
  return tracker.finish(t_fin, epsilon);
}

WaitingReport waiting_scaling_report(const std::vector<WaitingSample>& runs) {
  WaitingReport rep;
  std::vector<double> lx, ly;
  rep.c_emp = kNever;
  for (const auto& run : runs) {
    WaitingReport::Entry e;
    e.epsilon = run.epsilon;
    e.transitions = run.log.K_eps;
    e.min_waiting = run.log.min_waiting;
    e.applicable = run.log.K_eps >= 2 && run.log.min_waiting != kNever;
    if (!e.applicable) {
      rep.warnings.push_back("eps=" + std::to_string(run.epsilon) +
                             ": fewer than 2 completed transitions, excluded");
      rep.entries.push_back(e);
      continue;
    }
    const double tau_fin = run.log.t_fin * run.epsilon * run.epsilon;
    e.k_bound = tau_fin / (2.0 * run.log.d_emp() * run.epsilon);
    e.k_bound_holds = static_cast<double>(run.log.K_eps) <= e.k_bound;
    lx.push_back(std::log(run.epsilon));
    ly.push_back(std::log(e.min_waiting));
    const double b = run.beta * run.epsilon;
    if (b > 0.0) rep.c_emp = std::min(rep.c_emp, e.min_waiting * b / run.p_star);
    rep.entries.push_back(e);
  }
  if (lx.size() >= 2) {
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sx += lx[i];
      sy += ly[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * ly[i];
    }
    rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  } else {
    rep.warnings.push_back("fewer than two applicable runs, no slope");
  }
  if (rep.c_emp == kNever) rep.c_emp = 0.0;
  // Every waiting time of every run against the fitted bound.
  for (const auto& run : runs) {
    const double b = run.beta * run.epsilon;
    if (b <= 0.0) continue;
    const auto& recs = run.log.records;
    for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
      if (!recs[i].complete()) continue;
      const double w = recs[i + 1].t_hash - recs[i].t_star;
      if (!(w > 0.0) || w < rep.c_emp * run.p_star / b * (1.0 - 1e-12)) {
        rep.all_above_bound = false;
      }
    }
  }
  return rep;
}

}  // namespace splx
