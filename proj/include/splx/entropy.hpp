#pragma once

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "splx/lattice.hpp"
#include "splx/potential.hpp"

namespace splx {

using MuFunction = std::function<double(double)>;

/// Continuous, nondecreasing, piecewise linear; constant outside the knots.
struct PiecewiseLinearMu {
  std::vector<double> x, y;
  double operator()(double p) const;
};

PiecewiseLinearMu random_monotone_mu(std::mt19937_64& rng, int knots = 6, double span = 1.5);
/// Ramp from 0 to 1 over [p_tilde - width/2, p_tilde + width/2].
PiecewiseLinearMu smoothed_step_mu(double p_tilde, double width = 1e-3);

/// eta' = mu(Phi'(u)), eta(-u**) = 0.  eta is tabulated on [-range, range]
/// and completed inside a cell by adaptive Simpson.
class EntropyPair {
 public:
  EntropyPair(MuFunction mu, const PotentialParams& params, double range, double spacing);
  double mu(double p) const { return mu_(p); }
  double eta(double u) const;
  double anchor() const { return anchor_; }
  const PotentialParams& params() const { return params_; }

 private:
  MuFunction mu_;
  PotentialParams params_;
  double anchor_ = 0.0;
  double lo_ = 0.0, h_ = 0.0;
  std::vector<double> table_;
  double integrate(double a, double b) const;
};

/// Rejects mu that decreases on a grid of 1000 points over [-grid, grid].
EntropyPair make_pair(MuFunction mu, const PotentialParams& params, double range = 4.0,
                      double spacing = 1e-3, double grid = 3.0);

/// Adaptive Simpson with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 40);

struct BalanceTerms {
  double entropy = 0.0;      // sum eta(u_j) psi_j
  double flux = 0.0;         // sum mu(p_j) grad psi_j grad p_j
  double dissipation = 0.0;  // sum psi_{j+1} grad mu(p_j) grad p_j, >= 0
};

/// Sums over the window; gradients use the pairs (j, j+1) inside it, which is
/// exact summation by parts for reflecting ends.
BalanceTerms balance_terms(const std::vector<double>& u, const std::vector<double>& p,
                           const std::vector<double>& psi, const EntropyPair& pair);

/// E = N^{-1} sum Phi(u_j), D = N sum (p_{j+1} - p_j)^2 over the window.
struct EnergyDissipation {
  double E = 0.0;
  double D = 0.0;
};
EnergyDissipation energy_and_dissipation(const std::vector<double>& u, const std::vector<double>& p,
                                         long n, const PotentialParams& params);

/// Truncated Gaussian weight on the window (index j - lo), zero beyond 4 widths.
std::vector<double> gaussian_weight(long lo, std::size_t m, double center, double width);
/// Hat of half-width w around center.
std::vector<double> hat_weight(long lo, std::size_t m, double center, double width);

struct PairResult {
  std::string label;
  double max_residual = 0.0;         // sup_n of d/dt entropy + flux (central)
  double max_identity_error = 0.0;   // sup_n |d/dt entropy + flux + dissipation|
  double min_dissipation = 0.0;
  std::vector<double> residual;      // per interior step
};

struct DissipationPeak {
  long k = 0;
  double t_star = 0.0;
  double peak = 0.0;  // max of D over [t_star, t_star + 10]
  bool in_range = false;
};

struct EntropyReport {
  double dt = 0.0;
  long steps = 0;
  std::vector<PairResult> pairs;
  double energy_law_max = 0.0;        // sup_n |(E^{n+1} - E^n)/dt + eps^2 D^n|
  double energy_increase_max = 0.0;   // sup_n max(E^{n+1} - E^n, 0)
  std::vector<DissipationPeak> peaks;
  double balance_slack_min = 0.0;     // integrated energy balance, min over t
  std::vector<double> times, E, D;
};

/// Collects per-step data through a StepObserver and evaluates all entropy
/// diagnostics afterwards.
class EntropyMonitor {
 public:
  struct Test {
    std::string label;
    std::shared_ptr<EntropyPair> pair;
    std::vector<double> psi;
  };
  EntropyMonitor(const LatticeConfig& config, std::vector<Test> tests, long every = 1);
  StepObserver observer();
  EntropyReport report(const TransitionLog& log) const;

 private:
  LatticeConfig config_;
  PotentialParams params_;
  std::vector<Test> tests_;
  long every_;
  std::vector<double> psi_energy_;
  struct Row {
    double t = 0.0;
    double E = 0.0, D = 0.0;
    double energy_weighted = 0.0;  // sum Phi psi_e
    double energy_flux = 0.0;      // sum p grad psi_e grad p
    double energy_diss = 0.0;      // sum psi_e_{j+1} (grad p)^2
    std::vector<BalanceTerms> terms;
  };
  std::shared_ptr<std::vector<Row>> rows_;
};

std::string entropy_csv(const EntropyReport& r, double epsilon);

}  // namespace splx
