#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

namespace splinecomp::commands {

inline constexpr const char* kToolVersion = "splinecomp 1.0.0";

enum class Format { json, csv };

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitDesignFailure = 3,
  kExitValidationFailed = 4,
};

/// Serialized command output plus the manifest describing the run.
struct CommandOutput {
  std::string body;
  nlohmann::json manifest;
  int exit_code = kExitOk;
};

struct DesignOptions {
  int levels = 16;
  /// Empty means "auto": run the threshold sweep first.
  std::optional<double> x1;
  double grid_step = 0.01;
  Format format = Format::json;
};

struct SweepOptions {
  int levels = 16;
  double grid_step = 0.01;
  Format format = Format::json;
};

struct Table1Options {
  double grid_step = 0.01;
  Format format = Format::json;
};

struct ValidateOptions {
  int levels = 16;
  std::optional<double> x1;
  double grid_step = 0.01;
  std::size_t samples = 10'000'000;
  std::uint64_t seed = 42;
  Format format = Format::json;
};

struct LloydMaxOptions {
  int levels = 16;
  Format format = Format::json;
};

/// Rounds to 6 significant digits, the precision every number is emitted with.
double round6(double value);
std::string format_number(double value);

// Each command throws DomainError for arguments it rejects and DesignError
// for designs that cannot be built.
CommandOutput run_design(const DesignOptions& options);
CommandOutput run_sweep(const SweepOptions& options);
CommandOutput run_table1(const Table1Options& options);
CommandOutput run_validate(const ValidateOptions& options);
CommandOutput run_lloyd_max(const LloydMaxOptions& options);

}  // namespace splinecomp::commands
