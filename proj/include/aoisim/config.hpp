#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aoisim/types.hpp"

namespace aoisim {

/// Experiment description: shared cell parameters plus sweep axes. Parsed
/// from flat key-value text; repeated `policy`, `p`, and `t0` keys form the
/// sweep lists. Energy-removal policies expand over every t0; other policies
/// ignore the t0 axis.
struct ExperimentConfig {
  std::vector<PolicyKind> policies{PolicyKind::Bu};
  std::vector<double> p_values{1.0};
  std::vector<double> t0_values;           // required iff an ER policy is listed
  std::optional<Feedback> feedback;        // explicit override; derived per policy if unset
  std::optional<SpacingRule> spacings;     // const_renewal cells only
  double lambda = 1.0;
  double horizon = 1000.0;
  std::int64_t initial_energy = 1;
  std::int64_t n_paths = 1;
  std::uint64_t seed = 0;
  int checkpoints = 32;
  bool record_trace = false;

  /// Cross-product expansion into validated per-cell configs.
  /// Throws ConfigError naming the offending key on any invalid cell.
  std::vector<SimConfig> expand() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Materialize one cell of the sweep.
SimConfig make_cell(const ExperimentConfig& experiment, PolicyKind kind, double p,
                    std::optional<double> t0);

ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

/// Serialize in the same key-value format. Parsing the output reproduces the
/// identical ExperimentConfig.
void write_config(std::ostream& out, const ExperimentConfig& config);

/// write_config plus code-version metadata (as comments, ignored on re-parse).
void write_manifest(std::ostream& out, const ExperimentConfig& config);

/// Short file-name fragment for one expanded cell, e.g. "bur_er_p0.6_T0300".
std::string cell_label(const SimConfig& cell);

}  // namespace aoisim
