#pragma once

#include <stdexcept>
#include <string>

namespace sitesim {

// Bad user-supplied configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem failure, message carries the offending path (CLI exit code 3).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientLoad : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrajectoryTooLong : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidTrajectory : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LengthMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StalePlan : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleScenario : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sitesim
