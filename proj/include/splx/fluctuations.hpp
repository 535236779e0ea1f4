#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "splx/interface.hpp"
#include "splx/kernel.hpp"
#include "splx/lattice.hpp"

namespace splx {

/// rho_j = 2 p* / (1 + 2 kappa)^|j| on |j| <= radius.
struct ImpactProfile {
  double kappa = 1.0;
  long radius = 0;
  std::vector<double> values;  // values[j + radius]

  double at(long j) const;
  double mass() const;  // summed from the tails inward
};

ImpactProfile impact_profile(double kappa, double tol = 1e-18);

/// rho centred at site `center`, reflected into the Neumann window
/// [lo, lo + m); the folded mass equals the unfolded one.
std::vector<double> fold_profile(const ImpactProfile& rho, long center, long lo, std::size_t m);

/// r = ess + neg and ess = reg + res, each part exactly one of the two
/// summands or zero, so the identities hold bit for bit.
struct FluctuationParts {
  std::vector<double> r, ess, neg, reg, res;
};

struct FluctuationSummary {
  long k = 0;
  double t_hash = kNever, t_flat = kNever, t_star = kNever;
  double d_k = 0.0;
  bool d_k_flagged = false;        // quadrature did not reach the tolerance
  double l1_at_flat = 0.0;         // sum_j |r(t_flat)|
  double l1_profile_error = 0.0;   // sum_j |r(t_star) - rho_{.-k}|
  double excursion_sup_l1 = 0.0;   // sup over stored times in [t_hash, t_flat] of sum_j |r|
  double sup_abs = 0.0;            // sup over stored times of |r_j|
  double q_gap = 0.0;              // |q_k(t_star) - p*|, a lower bound for d_k
};

struct SuperpositionReport {
  double max_residual = 0.0;
  double time_of_max = 0.0;
  std::vector<double> times;
  std::vector<double> residuals;  // sup_j residual per stored time
};

struct RegularityReport {
  long times = 0;
  long transitions = 0;
  double sum_d_sqrt_eps = 0.0;    // sum_k D_k sqrt(eps)
  double neg_l1_sqrt_eps = 0.0;   // sup_t sum_j sum_k |r_neg| sqrt(eps)
  double reg_grad_l2_over_eps = 0.0;  // sup_t sum_j |grad R_reg|^2 / eps
  double holder_quotient = 0.0;   // sampled Hoelder quotient of R_reg
  double res_l1 = 0.0;            // sup_t sum_j sum_k |r_res|
  double sup_reg = 0.0, sup_neg = 0.0, sup_res = 0.0;
  double ess_mass_error = 0.0;    // max_t |sum ess - 2 #{t_k^* <= t}|
};

struct FluctuationOptions {
  double d_window = -1.0;        // microscopic length; negative: d_emp / eps
  long max_times = 400;          // analysis grid cap
  double quad_rel_tol = 0.01;
  long quad_max_intervals = 1L << 15;
  std::uint64_t seed = 12345;    // Hoelder pair sampling
  long holder_random_pairs = 4000;
};

enum class SemigroupBackend { spectral, images };

/// Offline decomposition of a stored trajectory.  All heat flows are the
/// exact semigroup of the lattice window with reflecting ends.
class FluctuationEngine {
 public:
  FluctuationEngine(const Trajectory& traj, const TransitionLog& log,
                    FluctuationOptions options = {});
  ~FluctuationEngine();
  FluctuationEngine(const FluctuationEngine&) = delete;
  FluctuationEngine& operator=(const FluctuationEngine&) = delete;

  std::size_t size() const { return recs_.size(); }
  const TransitionRecord& record(std::size_t i) const;
  double d_window() const { return d_window_; }
  const Trajectory& trajectory() const { return traj_; }
  const NeumannFlow& flow() const { return *flow_; }

  /// q^(k)(t) = S(t - t_hash) p(t_hash); zero before t_hash.
  std::vector<double> q(std::size_t i, double t) const;
  /// All parts of r^(k) at a stored time.  With left_limit, a snapshot at
  /// t_k^* is evaluated as the limit from the passage side.
  FluctuationParts parts(std::size_t i, std::size_t snapshot, bool left_limit = false) const;
  /// D_k by trapezoid quadrature with step halving on a graded grid.
  double compute_D(std::size_t i, bool* flagged = nullptr) const;
  FluctuationSummary summary(std::size_t i) const;
  std::vector<FluctuationSummary> summaries() const;
  /// q^(k)(t_hash) against S(t) p(0) - sum_{l<k} S(t - t_l^*) r^(l)(t_l^*),
  /// relative sup-norm difference.
  double recursion_error(std::size_t i) const;

  /// S(t) p(0)
  std::vector<double> initial_flow(double t) const;
  /// p(t) - S(t) p(0) + sum_k r^(k)(t) at a stored time.
  std::vector<double> superposition_field(std::size_t snapshot,
                                          SemigroupBackend backend = SemigroupBackend::spectral,
                                          long images_radius = 0) const;
  SuperpositionReport superposition_check(SemigroupBackend backend = SemigroupBackend::spectral,
                                          long images_radius = 0, long stride = 1) const;

  /// Stored times used for aggregate statistics: capped regular states plus
  /// every event state.
  std::vector<std::size_t> analysis_snapshots() const;

  struct Aggregates {
    double t = 0.0;
    std::vector<double> Q, R_ess, R_neg, R_reg, R_res;
    double neg_abs_l1 = 0.0;  // sum_j sum_k |r_neg|
    double res_abs_l1 = 0.0;
    double ess_mass = 0.0;
    long completed = 0;       // #{k: t_k^* <= t}
  };
  Aggregates aggregates(std::size_t snapshot, bool left_limit = false) const;

  RegularityReport regularity_report() const;

 private:
  struct PerRecord {
    TransitionRecord rec;
    std::size_t idx = 0;         // k - lo
    std::vector<double> q_hat;   // of p(t_hash)
    std::vector<double> r_hat;   // of r(t_star)
    std::vector<double> ess_hat;
    std::vector<double> neg_hat;
    std::vector<double> rho_fold;
    std::vector<double> r_star;
    bool has_star = false;
  };
  std::vector<double> images_flow(const std::vector<double>& v, double t, long radius) const;

  const Trajectory& traj_;
  TransitionLog log_;
  FluctuationOptions opt_;
  double d_window_;
  double epsilon_;
  double p_star_;
  ImpactProfile rho_;
  std::unique_ptr<NeumannFlow> flow_;
  std::vector<double> p0_hat_;
  std::vector<PerRecord> recs_;
};

/// Writes d_k into the log records.
void fill_forcing_integrals(const FluctuationEngine& engine, TransitionLog& log);

/// JSON array of per-k summaries.
std::string summaries_to_json(const std::vector<FluctuationSummary>& s, double epsilon);

}  // namespace splx
