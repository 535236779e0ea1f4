#pragma once

#include <functional>
#include <string>
#include <vector>

namespace splx {

using Forcing = std::function<double(double)>;

/// Sampled solution of the prototypical spinodal problem on sites
/// -window..window (index j + window), reflecting ends.
struct ToyTrajectory {
  double kappa = 1.0;
  long window = 0;
  double dt = 0.0;
  long stride = 1;                       // Euler steps between stored states
  std::vector<double> times;
  std::vector<std::vector<double>> z;
  std::vector<double> forcing;           // f at stored times
  std::vector<double> forcing_l1;        // int_0^t |f|, trapezoid on the step grid
  bool overflow = false;                 // |z_0| exceeded the cap; truncated here
  double overflow_time = 0.0;

  double at(std::size_t n, long j) const { return z[n][static_cast<std::size_t>(j + window)]; }
};

struct ToyOptions {
  double dt = 0.0;         // 0 selects the lattice stability bound
  long stride = 1;
  double cap = 1e200;
  double boundary_tol = 1e-10;  // window must exceed the kernel truncation radius
};

/// Explicit Euler for dz_0 = -kappa Delta z_0 + (1+kappa) f, dz_j = Delta z_j.
ToyTrajectory simulate_toy(const std::vector<double>& z0, double kappa, const Forcing& f,
                           double t_fin, const ToyOptions& options = {});

/// Even part on 0..W of a symmetric-window sequence (index j + W).
std::vector<double> even_part(const std::vector<double>& z);

/// zeta_n for n = 1..W (index n - 1) from the even part of z.
std::vector<double> slow_variables(const std::vector<double>& z, double kappa);

struct SlowFastSplit {
  std::vector<double> z_fast;
  std::vector<double> z_slow;
  std::vector<double> zeta;
  long bitwise_mismatches = 0;  // sites where z_fast + z_slow != z
  double max_fast_adjust = 0.0; // |z_fast - z_0 (1+2 kappa)^-|j|| from exact rounding
};

/// z_slow = z - z_fast with z_fast re-derived as z - z_slow, which makes
/// the sum reproduce z exactly wherever the subtraction is exact.
SlowFastSplit split_slow_fast(const std::vector<double>& z, double kappa);

/// Relative sup residual of the representation formula for the even part,
/// evaluated by the recursion A_j = (A_{j-1} + 2 kappa zeta_j) / (1 + 2 kappa).
double representation_residual(const std::vector<double>& z, double kappa);

struct SlowDynamicsResidual {
  double z0 = 0.0;      // sup_t |dz_0/dt - (4k^2/(1+2k))(z_0 - zeta_1) - (1+k) f|
  double zeta1 = 0.0;   // sup_t |dzeta_1/dt - (zeta_2 - zeta_1) + (1+k)/(2k) f|
  double zeta_n = 0.0;  // sup_t,n |dzeta_n/dt - Delta zeta_n|, n = 2..W-2
  double scale = 0.0;   // sup_t |z_0|
};

/// Central differences over consecutive stored states of an even
/// trajectory; requires stride == 1 for the O(dt) interpretation.
SlowDynamicsResidual slow_dynamics_residual(const ToyTrajectory& traj);

struct SlowBoundReport {
  std::vector<double> times;
  std::vector<double> ratio;        // sum|z_slow| / (sum|z(0)| + int|f|)
  std::vector<double> running_max;
  double max_ratio = 0.0;
  double late_growth = 0.0;         // running max at t_fin over running max at t_fin/2, minus 1
  double fast_growth = 0.0;         // max_j |z_j(t_end)| / max(max_j |z_j(t_first)|, tiny)
  double fast_l1_end = 0.0;
};

SlowBoundReport slow_bound_check(const ToyTrajectory& traj);

}  // namespace splx
