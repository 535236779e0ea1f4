#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "splx/interface.hpp"
#include "splx/lattice.hpp"

namespace splx {

inline constexpr const char* kSuiteVersion = "1.0.0";
inline constexpr std::uint32_t kBinaryVersion = 1;

std::uint64_t fnv1a(std::string_view data);
std::string hex64(std::uint64_t v);

/// Provenance written into every artifact.
struct Stamp {
  std::string suite_version = kSuiteVersion;
  std::string config_hash;
};

/// First line: header object; then one record {t, tau, k, inside, kind,
/// event, u} per snapshot.  Doubles are printed round-trip exact.
void write_snapshots_jsonl(const std::filesystem::path& file, const Trajectory& traj,
                           const Stamp& stamp);
Trajectory read_snapshots_jsonl(const std::filesystem::path& file, Stamp* stamp = nullptr);

/// Per snapshot: "SPLX", u32 version, u32 N, f64 t, then N f64 values of u;
/// all little-endian.
struct BinaryRecord {
  double t = 0.0;
  std::vector<double> values;
};
void write_snapshots_bin(const std::filesystem::path& file, const Trajectory& traj);
void write_records_bin(const std::filesystem::path& file, const std::vector<BinaryRecord>& records);
std::vector<BinaryRecord> read_records_bin(const std::filesystem::path& file);

std::string log_to_json(const TransitionLog& log, const Stamp& stamp);
TransitionLog log_from_json(const std::string& text, Stamp* stamp = nullptr);

std::string events_to_jsonl(const std::vector<Event>& events);
std::vector<Event> events_from_jsonl(const std::string& text);

std::string read_text(const std::filesystem::path& file);
void write_text(const std::filesystem::path& file, const std::string& text);

/// Canonical text of the macroscopic initial data, hashed to tie lattice
/// runs to the reference solution they are compared with.
std::string describe(const MacroProfile& profile, double kappa);

}  // namespace splx
