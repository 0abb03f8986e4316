#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "aoisim/config.hpp"
#include "aoisim/types.hpp"

namespace aoisim {

// CLI exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitSimulationError = 2;
inline constexpr int kExitThresholdFailure = 3;

struct RunOptions {
  std::filesystem::path out_dir;
  int threads = 1;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> checkpoints_override;
  std::optional<bool> trace_override;
};

/// Expand the experiment, run every cell, and write per-cell convergence
/// curves, a combined long-format file, a summary table, and a manifest.
/// Returns kExitThresholdFailure if any cell's mean dips significantly below
/// its theorem bound at some checkpoint.
int cmd_run(const ExperimentConfig& experiment, const RunOptions& options,
            std::ostream& log);

/// Table of (p, no-feedback bound, feedback bound) per unit arrival rate.
int cmd_bounds(const std::vector<double>& p_values, std::ostream& out);

/// Common-random-number dominance comparison between a policy and its
/// energy-removal variant. Returns kExitThresholdFailure on any violation.
int cmd_paired(const ExperimentConfig& experiment, PolicyKind parent, PolicyKind variant,
               const RunOptions& options, std::ostream& log);

/// Per-T0 renewal-cycle statistics table for an ER policy sweep.
int cmd_cycles(const ExperimentConfig& experiment, const RunOptions& options,
               std::ostream& log);

}  // namespace aoisim
