#pragma once

#include <string_view>

namespace splx {

/// Trilinear constitutive law: slope +1 on both phases, slope -kappa on the
/// spinodal branch.  Thresholds are derived once from kappa and stored.
struct PotentialParams {
  double kappa = 1.0;
  double u_star = 0.5;       // 1/(1+kappa)
  double p_star = 0.5;       // kappa/(1+kappa)
  double u_star_star = 1.5;  // (1+2 kappa)/(1+kappa)
};

/// Builds the parameter record; throws DomainError unless kappa is finite and
/// positive.
PotentialParams derive_params(double kappa);

enum class Phase { minus, plus, spinodal, boundary_minus, boundary_plus };

std::string_view to_string(Phase phase);

/// Phi'(u).  Exact values +-p_star are returned at u = -+u_star.
double phi_prime(double u, const PotentialParams& params);

/// Double-well energy Phi(u) >= 0 with zeros at u = +-1.
double phi(double u, const PotentialParams& params);

/// Exact threshold comparison, no tolerance.
Phase classify(double u, const PotentialParams& params);

}  // namespace splx
