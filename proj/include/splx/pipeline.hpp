#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "splx/config.hpp"
#include "splx/fluctuations.hpp"
#include "splx/io.hpp"
#include "splx/lattice.hpp"

namespace splx {

/// Writes snapshots/, logs/ and a run summary under dir.
void save_run(const std::filesystem::path& dir, const SimulationResult& run, const Stamp& stamp,
              std::uint64_t data_hash);

struct LoadedRun {
  Trajectory trajectory;
  TransitionLog log;
  Stamp stamp;
  std::uint64_t data_hash = 0;
};

/// IoError when the trajectory or the log is missing.
LoadedRun load_run(const std::filesystem::path& dir);

/// Runs tasks 0..count-1 on up to `workers` threads; results land by index,
/// so the outcome does not depend on scheduling.
void parallel_for(std::size_t count, long workers, const std::function<void(std::size_t)>& task);

/// One simulation per N in cfg.sweep_n, in that order.
std::vector<SimulationResult> run_sweep(const RunConfig& cfg, long workers);

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<Check> checks;
  bool passed() const;
  std::string to_json(const Stamp& stamp) const;
};

/// Structural invariants, superposition, entropy and energy laws, kernel and
/// impact-profile identities for the configured run.
VerifyReport verify_run(const RunConfig& cfg);

}  // namespace splx
