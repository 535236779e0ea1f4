#pragma once

#include <limits>
#include <string>
#include <vector>

namespace splx {

inline constexpr double kNever = std::numeric_limits<double>::infinity();

enum class EventKind {
  enter,      // u_k crosses -u* upward
  exit_low,   // u_k returns below -u*, ending an excursion
  exit_high,  // u_k reaches +u*, the phase transition of particle k
};

std::string to_string(EventKind kind);
EventKind event_kind_from_string(const std::string& name);

/// Threshold crossing emitted by the integrator.
struct Event {
  double t = 0.0;
  EventKind kind = EventKind::enter;
  long k = 0;
  double u_left = 0.0;  // u_{k-1} at the event
  double lap_p = 0.0;   // (Delta p)_k at the event
};

struct Excursion {
  double enter = 0.0;
  double exit = 0.0;
};

struct TransitionRecord {
  long k = 0;
  double t_hash = kNever;  // first spinodal entrance
  double t_flat = kNever;  // final spinodal entrance
  double t_star = kNever;  // exit through +u*
  std::vector<Excursion> excursions;
  double d_k = 0.0;

  bool complete() const { return t_star != kNever; }
};

struct TransitionLog {
  std::vector<TransitionRecord> records;
  double epsilon = 0.0;
  double t_fin = 0.0;
  long k_initial = 0;
  long K_eps = 0;
  double min_waiting = kNever;  // min_k t_{k+1}^# - t_k^*

  /// min_waiting * epsilon / 2, infinite when no waiting time was observed.
  double d_emp() const;
  /// sum over visits of (t^* - t^#) eps^3, unfinished visits cut at t_fin.
  double interface_region_measure() const;
  long interface_index_at(double t) const;       // k(t), jumps at t_k^*
  long hash_index_at(double t) const;            // k with t in [t_{k-1}^#, t_k^#)
};

/// Consumes events in time order; throws InvariantViolation on malformed
/// streams (out of order, double entrance, exits without entrance).
class Tracker {
 public:
  explicit Tracker(long k_initial) : k_next_(k_initial), k_initial_(k_initial) {}
  void push(const Event& ev);
  TransitionLog finish(double t_fin, double epsilon) const;

 private:
  std::vector<TransitionRecord> records_;
  long k_next_;
  long k_initial_;
  bool inside_ = false;
  bool open_ = false;
  double last_enter_ = 0.0;
  double last_t_ = -kNever;
};

TransitionLog track(const std::vector<Event>& events, long k_initial, double t_fin,
                    double epsilon);

/// One member of an epsilon sweep with identical macroscopic data.
struct WaitingSample {
  double epsilon = 0.0;
  double beta = 0.0;    // majorant slope b = beta * epsilon
  double p_star = 0.0;
  TransitionLog log;
};

struct WaitingReport {
  struct Entry {
    double epsilon = 0.0;
    double min_waiting = kNever;
    long transitions = 0;
    bool applicable = false;  // at least two completed transitions
    double k_bound = kNever;  // tau_fin / (2 d_emp eps)
    bool k_bound_holds = true;
  };
  std::vector<Entry> entries;
  double slope = 0.0;   // d log(min_waiting) / d log(eps)
  double c_emp = 0.0;   // min over runs of min_waiting * b / p*
  bool all_above_bound = true;
  std::vector<std::string> warnings;
};

WaitingReport waiting_scaling_report(const std::vector<WaitingSample>& runs);

}  // namespace splx
