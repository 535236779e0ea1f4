#pragma once

#include <functional>
#include <vector>

namespace splx {

enum class Regime { pinned = 0, moving = 1 };

struct StefanGrid {
  long cells = 1000;       // uniform grid on [0, 1]
  double cfl = 0.4;        // dtau = cfl h^2, at most 0.4
  long samples = 200;      // stored field profiles
  long curve_points = 4000;
};

struct StefanSolution {
  double p_star = 0.5;
  double tau_fin = 0.0;
  double h = 0.0;
  double dtau = 0.0;
  std::vector<double> xi;                 // grid nodes
  std::vector<double> tau;                // sample times
  std::vector<std::vector<double>> P;     // P(tau_s, xi_i)
  std::vector<double> Xi;                 // Xi(tau_s)
  std::vector<Regime> regime;             // regime of the step ending at tau_s
  std::vector<double> curve_tau, curve_Xi;  // finer interface curve
  std::vector<Regime> curve_regime;
  bool truncated = false;                 // interface reached the grid end

  double interface_at(double tau) const;
  /// Field at a sample by linear interpolation in xi.
  double field_at(std::size_t sample, double x) const;
};

/// Front tracking for the hysteretic Stefan problem with rightward motion:
/// heat equation on both sides; pinned while the trace stays below p* (plain
/// heat flow across the interface), moving with P(Xi) = p* and
/// 2 dXi/dtau = dP(Xi+) - dP(Xi-) while that speed is positive.
StefanSolution solve_stefan(const std::function<double(double)>& p_ini, double xi_ini,
                            double kappa, double tau_fin, const StefanGrid& grid = {});

}  // namespace splx
