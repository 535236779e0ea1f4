#pragma once

#include <string>
#include <vector>

#include "splx/lattice.hpp"

namespace splx {

/// Named macroscopic data sets used by the CLI, the tests and the
/// acceptance runs.
struct Scenario {
  std::string name;
  std::string description;
  MacroProfile profile;
  double kappa = 1.0;
  double tau_fin = 0.05;
};

/// hot_left: steadily advancing front; front_pinning: advance, then pinned;
/// front_depinning: pinned until heat from the left arrives; stationary:
/// P = 0 on both sides.
Scenario scenario(const std::string& name);
std::vector<std::string> scenario_names();

/// Shifts the level so that P(xi_ini) equals the target.
void set_trace(MacroProfile& profile, double target);

}  // namespace splx
