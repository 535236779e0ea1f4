#include "splx/potential.hpp"

#include <cmath>

#include "splx/errors.hpp"

namespace splx {

PotentialParams derive_params(double kappa) {
  if (!std::isfinite(kappa) || kappa <= 0.0) {
    throw DomainError("kappa must be finite and positive");
  }
  const long double k = kappa;
  const long double denom = 1.0L + k;
  PotentialParams params;
  params.kappa = kappa;
  params.u_star = static_cast<double>(1.0L / denom);
  params.p_star = static_cast<double>(k / denom);
  params.u_star_star = static_cast<double>((1.0L + 2.0L * k) / denom);
  return params;
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::minus: return "minus";
    case Phase::plus: return "plus";
    case Phase::spinodal: return "spinodal";
    case Phase::boundary_minus: return "boundary_minus";
    case Phase::boundary_plus: return "boundary_plus";
  }
  return "unknown";
}

double phi_prime(double u, const PotentialParams& params) {
  if (!std::isfinite(u)) throw DomainError("phi_prime: non-finite argument");
  if (u == -params.u_star) return params.p_star;
  if (u == params.u_star) return -params.p_star;
  if (u < -params.u_star) return u + 1.0;
  if (u > params.u_star) return u - 1.0;
  return -params.kappa * u;
}

double phi(double u, const PotentialParams& params) {
  if (!std::isfinite(u)) throw DomainError("phi: non-finite argument");
  if (u <= -params.u_star) return 0.5 * (u + 1.0) * (u + 1.0);
  if (u >= params.u_star) return 0.5 * (u - 1.0) * (u - 1.0);
  return 0.5 * (params.p_star - params.kappa * u * u);
}

Phase classify(double u, const PotentialParams& params) {
  if (u < -params.u_star) return Phase::minus;
  if (u > params.u_star) return Phase::plus;
  if (u == -params.u_star) return Phase::boundary_minus;
  if (u == params.u_star) return Phase::boundary_plus;
  return Phase::spinodal;
}

}  // namespace splx
