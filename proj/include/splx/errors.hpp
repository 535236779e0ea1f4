#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace splx {

/// Argument outside the mathematical domain of an operation (negative time,
/// non-positive slope parameter, non-finite input, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A lattice state left the single-interface state space or broke one of the
/// a-priori bounds.  Carries the offending site and time for diagnostics.
class InvariantViolation : public std::runtime_error {
 public:
  InvariantViolation(const std::string& what, long site, double time)
      : std::runtime_error(what), site_(site), time_(time) {}

  long site() const noexcept { return site_; }
  double time() const noexcept { return time_; }

 private:
  long site_;
  double time_;
};

/// Truncation window cannot deliver the requested tolerance.
class WindowTooSmall : public std::runtime_error {
 public:
  WindowTooSmall(const std::string& what, std::size_t required)
      : std::runtime_error(what), required_(required) {}

  /// Smallest window length (in sites) that meets the tolerance.
  std::size_t required_size() const noexcept { return required_; }

 private:
  std::size_t required_;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Persistence failure (unreadable file, bad magic, short write).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace splx
