#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "splx/interface.hpp"
#include "splx/potential.hpp"

namespace splx {

enum class BoundaryMode { neumann, padded };

std::string to_string(BoundaryMode mode);

struct LatticeConfig {
  long n_particles = 200;
  double kappa = 1.0;
  double epsilon = 0.0;  // 0 selects 1/N
  double dt = 0.0;       // 0 selects the stability bound
  BoundaryMode bc = BoundaryMode::neumann;
  long pad = -1;         // padded mode only; -1 selects ceil(4 sqrt(t_fin))
  double tau_fin = 0.05;
  long snapshot_stride = 0;  // steps between stored states; 0 selects ~500 states
  double cfl_safety = 0.4;

  double eps() const;
  double t_fin() const;
  /// eta / (4 max(1, kappa))
  double max_dt() const;
  long steps() const;
  /// Step actually used: t_fin / steps(), never above dt or max_dt().
  double step_size() const;
  long padding() const;
  long lo() const;
  long hi() const;
  long stride() const;
};

/// Throws ConfigError on inconsistent values.
void validate(const LatticeConfig& config);

struct GaussianBump {
  double amplitude = 0.0;
  double center = 0.0;
  double width = 1.0;
};

struct TanhRamp {
  double amplitude = 0.0;  // half the total rise
  double center = 0.0;
  double width = 1.0;
};

/// P(xi) = level + slope_left min(xi - Xi, 0) + slope_right max(xi - Xi, 0)
///         + sum_i A_i exp(-((xi - m_i) / w_i)^2) + sum_i R_i tanh((xi - c_i) / s_i)
/// Continuous everywhere with at most a kink at the interface Xi.
struct MacroProfile {
  double xi_ini = 0.5;
  double level = 0.0;
  double slope_left = 0.0;
  double slope_right = 0.0;
  std::vector<GaussianBump> bumps;
  std::vector<TanhRamp> ramps;

  double operator()(double xi) const;
};

/// u_j = c_+ + d_+ arctan(eps j + e_+) for j < j_star, and the minus branch
/// for j >= j_star.
struct ArctanData {
  double c_plus = 1.2, d_plus = -0.1, e_plus = -0.3;
  double c_minus = -0.9, d_minus = -0.1, e_minus = -0.3;
  long j_star = 100;
};

enum class InitVariant { macroscopic, arctan, raw };

struct InitialDataSpec {
  InitVariant variant = InitVariant::macroscopic;
  MacroProfile macro;
  ArctanData arctan;
  std::vector<double> raw;  // u_1 .. u_N
  double alpha = 0.0;       // 0: derive instead of check
  double beta = 0.0;
};

/// Regularity certificates of the sampled initial p, and the majorant slope b
/// with p_j(0) <= p* + b max(k0 - j, 0).
struct Certificates {
  double alpha = 0.0;
  double beta = 0.0;
  double b = 0.0;
  long k0 = 0;
};

Certificates compute_certificates(const std::vector<double>& u_sites,
                                  const PotentialParams& params, double epsilon,
                                  long k0);

struct LatticeState {
  double t = 0.0;
  long lo = 1;
  std::vector<double> u;
  std::vector<double> p;
  long k = 1;            // interface index
  bool inside = false;   // u_k currently spinodal (between entrance and exit)

  long hi() const { return lo + static_cast<long>(u.size()) - 1; }
  double u_at(long j) const { return u[static_cast<std::size_t>(j - lo)]; }
  double p_at(long j) const { return p[static_cast<std::size_t>(j - lo)]; }
};

/// Samples the initial data on [lo, hi]; sites outside [1, N] copy the end
/// values.  Throws InvariantViolation (with site) outside X_{k0}, DomainError
/// on violated certificates.
LatticeState init(const InitialDataSpec& spec, const LatticeConfig& config,
                  Certificates* certificates = nullptr);

/// The u_1..u_N samples of the initial data.
std::vector<double> sample_initial(const InitialDataSpec& spec, const LatticeConfig& config);

/// Explicit Euler for du/dt = Delta Phi'(u) with reflecting ends.  Crossings
/// of -u* and +u* by the interface particle are located exactly inside the
/// step (the Euler update is affine in the substep length).
class Integrator {
 public:
  Integrator(const PotentialParams& params, double u_upper, double slack = 1e-8);

  /// Advances by dt, appending events.  Throws InvariantViolation when the
  /// state leaves the single-interface state space.
  void step(LatticeState& state, double dt, std::vector<Event>* events);

  /// Called with the state snapped onto the threshold at every event.
  std::function<void(const LatticeState&, const Event&)> on_event;
  void recompute_p(LatticeState& state) const;

  double u_upper() const { return u_upper_; }

 private:
  PotentialParams params_;
  double u_upper_;
  double slack_;
  std::vector<double> flux_;
};

/// Single step without event bookkeeping.
LatticeState step(const LatticeState& state, double dt, const PotentialParams& params);

enum class SnapshotKind : std::uint8_t { regular = 0, event = 1 };

struct Snapshot {
  double t = 0.0;
  long k = 0;
  bool inside = false;
  SnapshotKind kind = SnapshotKind::regular;
  EventKind event = EventKind::enter;  // meaningful for event snapshots
  std::vector<double> u;
};

struct Trajectory {
  long n_particles = 0;
  long lo = 1;
  double kappa = 1.0;
  double epsilon = 0.0;
  double dt = 0.0;
  double t_fin = 0.0;
  BoundaryMode bc = BoundaryMode::neumann;
  std::vector<Snapshot> snapshots;  // time-ordered

  std::size_t sites() const;
  std::vector<double> p_of(const Snapshot& s) const;
  /// Snapshot stored exactly at time t (event or regular); throws otherwise.
  const Snapshot& exact(double t) const;
  std::vector<std::size_t> regular_indices() const;
};

struct StepObserver {
  long every = 1;  // invoked after every `every` full steps, and at t = 0
  std::function<void(const LatticeState&)> fn;
};

struct SimulationResult {
  Trajectory trajectory;
  std::vector<Event> events;
  TransitionLog log;
  Certificates certificates;
  double mass_drift = 0.0;  // |sum u(t_fin) - sum u(0)|
  long steps = 0;
};

SimulationResult simulate(const LatticeConfig& config, const InitialDataSpec& spec,
                          const std::vector<StepObserver>& observers = {});

struct StructureReport {
  long snapshots = 0;
  long multiple_spinodal = 0;
  long bound_violations = 0;
  long membership_violations = 0;
  long entrance_violations = 0;
  long exit_violations = 0;
  long ordering_violations = 0;
  long majorant_violations = 0;
  double max_majorant_excess = 0.0;

  long total() const;
};

/// Invariants of single-interface solutions on every stored snapshot.
StructureReport verify_structure(const SimulationResult& run, double slack = 1e-8);

}  // namespace splx
