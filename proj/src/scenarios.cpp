#include "splx/scenarios.hpp"

#include "splx/errors.hpp"

namespace splx {

void set_trace(MacroProfile& profile, double target) {
  profile.level += target - profile(profile.xi_ini);
}

Scenario scenario(const std::string& name) {
  Scenario s;
  s.name = name;
  MacroProfile& m = s.profile;
  if (name == "hot_left") {
    s.description = "linear profile with a kink at the interface; the front keeps moving";
    m.xi_ini = 0.4;
    m.level = 0.48;
    m.slope_left = -5.0;
    m.slope_right = -0.5;
    s.tau_fin = 0.05;
  } else if (name == "front_pinning") {
    s.description = "warm band left of the interface, cold far field; advances, then pins";
    m.xi_ini = 0.4;
    m.slope_left = -7.0;
    m.slope_right = -1.0;
    m.ramps.push_back({1.6, 0.15, 0.04});
    set_trace(m, 0.485);
    s.tau_fin = 0.1;
  } else if (name == "front_depinning") {
    s.description = "pinned interface; a hot bump on the left depins it";
    m.xi_ini = 0.5;
    m.level = 0.1;
    m.bumps.push_back({4.0, 0.15, 0.08});
    s.tau_fin = 0.1;
  } else if (name == "stationary") {
    s.description = "P = 0 everywhere; nothing moves";
    m.xi_ini = 0.5;
    m.level = 0.0;
    s.tau_fin = 0.01;
  } else {
    throw ConfigError("unknown scenario '" + name + "'");
  }
  return s;
}

std::vector<std::string> scenario_names() {
  return {"hot_left", "front_pinning", "front_depinning", "stationary"};
}

}  // namespace splx
