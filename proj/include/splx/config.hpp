#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "splx/lattice.hpp"
#include "splx/stefan.hpp"

namespace splx {

/// Effective configuration of every subcommand.  Text form: INI sections
/// with typed keys; unknown sections or keys are rejected.
struct RunConfig {
  // [run]
  std::string out = "out";
  long workers = 0;  // 0: SPLX_WORKERS, then hardware concurrency
  std::uint64_t seed = 12345;
  std::string scenario = "hot_left";

  // [lattice]
  long n = 200;
  double kappa = 1.0;
  double tau_fin = -1.0;  // negative: scenario default
  double dt = 0.0;
  std::string bc = "neumann";
  long pad = -1;
  long snapshot_stride = 0;
  std::string init = "macroscopic";  // macroscopic | arctan

  // [profile] overrides of the scenario data (NaN: keep)
  double xi_ini = std::numeric_limits<double>::quiet_NaN();
  double trace = std::numeric_limits<double>::quiet_NaN();  // target P(xi_ini)
  double slope_left = std::numeric_limits<double>::quiet_NaN();
  double slope_right = std::numeric_limits<double>::quiet_NaN();
  std::string bumps;  // "A:m:w;A:m:w", replaces the scenario bumps when set
  std::string ramps;

  // [arctan]
  ArctanData arctan;

  // [fluct]
  double d_window = -1.0;
  long max_times = 400;
  double quad_rel_tol = 0.01;

  // [sweep]
  std::vector<long> sweep_n = {100, 200, 400};

  // [stefan]
  long stefan_cells = 1600;
  double stefan_cfl = 0.4;

  // [toy]
  double toy_kappa = 1.0;
  double toy_f_const = 0.02;
  double toy_t_fin = 20.0;
  double toy_dt = 0.0;
  long toy_window = 100;
  long toy_stride = 100;

  LatticeConfig lattice() const;
  InitialDataSpec initial_data() const;
  MacroProfile profile() const;
  double effective_tau_fin() const;
  StefanGrid stefan_grid() const;
  long effective_workers() const;

  /// Canonical key=value text of all fields (sorted sections and keys).
  std::string canonical() const;
  std::uint64_t hash() const;
  /// Hash of the macroscopic data and kappa only.
  std::uint64_t data_hash() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& file);
/// Applies one `section.key=value` assignment with the same validation.
void set_option(RunConfig& cfg, const std::string& section, const std::string& key,
                const std::string& value);

}  // namespace splx
