#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aoisim/random.hpp"
#include "aoisim/stats.hpp"
#include "aoisim/trace.hpp"
#include "aoisim/types.hpp"

namespace aoisim {

/// Sampled state at one convergence checkpoint (physical time units).
struct CheckpointStat {
  double t = 0.0;
  double time_avg_aoi = 0.0;     // R(t)/t
  double instantaneous_aoi = 0.0;
  std::int64_t battery = 0;
};

/// One renewal cycle of an energy-removal policy, in physical time units.
/// residual_age is the age of the last pre-boundary success at the stage
/// boundary. stage2_epochs counts scheduled epochs during stage two (the
/// integer p*T2 of the retransmission variant).
struct CycleStats {
  double stage1_len = 0.0;
  double stage2_len = 0.0;
  double residual_age = 0.0;
  std::int64_t stage2_epochs = 0;
  bool completed = false;
};

struct PathResult {
  double time_avg_aoi = 0.0;
  std::int64_t n_success = 0;
  std::int64_t n_attempts = 0;
  std::int64_t n_arrivals = 0;
  double aoi_check_rel_err = 0.0;  // disagreement between the two area routes
  std::vector<CheckpointStat> checkpoints;
  std::vector<CycleStats> cycles;        // ER policies only
  std::vector<double> success_times;     // record_trace only
  std::vector<TraceEvent> trace;         // record_trace only
};

struct SeriesStat {
  double t = 0.0;
  double mean = 0.0;
  double stderr_mean = 0.0;
  double p10 = 0.0, p50 = 0.0, p90 = 0.0;
};

/// Pooled per-cycle moments over completed cycles.
struct CycleMoments {
  MomentAccumulator stage1_len;
  MomentAccumulator stage2_len;
  MomentAccumulator residual_age;
  MomentAccumulator stage2_epochs;
  std::int64_t n_completed = 0;
  std::int64_t n_incomplete = 0;
};

/// Cross-path aggregates. Per-path values are retained (path order) so that
/// summaries merge exactly and percentile bands are reproducible.
struct EnsembleSummary {
  std::int64_t n_paths = 0;
  double mean = 0.0;
  double stderr_mean = 0.0;
  double p10 = 0.0, p50 = 0.0, p90 = 0.0;
  std::vector<double> checkpoint_times;               // physical
  std::vector<double> per_path_avg;                   // [path]
  std::vector<std::vector<double>> per_path_series;   // [path][checkpoint]
  std::vector<SeriesStat> series;                     // aggregated per checkpoint
  CycleMoments cycles;
};

/// Simulate one sample path. Deterministic in (config, path_index).
PathResult run_path(const SimConfig& config, std::uint64_t path_index);

/// Same loop with injectable randomness (used by tests to script scenarios).
PathResult run_path_with(const SimConfig& config, ArrivalSource& arrivals,
                         ChannelOracle& channel);

EnsembleSummary run_ensemble(const SimConfig& config, int threads = 1);
EnsembleSummary run_ensemble_range(const SimConfig& config, std::int64_t first_path,
                                   std::int64_t last_path, int threads = 1);
/// Exact merge: equals the summary computed over the concatenated path sets.
EnsembleSummary merge_ensembles(const EnsembleSummary& a, const EnsembleSummary& b);

struct PairedPathReport {
  std::int64_t path_index = 0;
  std::int64_t aoi_violations = 0;       // checkpoints where variant age < parent age
  std::int64_t battery_violations = 0;   // checkpoints where variant battery > parent
  double first_violation_time = -1.0;    // physical, -1 when clean
  double avg_aoi_gap = 0.0;              // variant minus parent, time-average at horizon
};

struct PairedReport {
  std::int64_t n_paths = 0;
  std::int64_t total_aoi_violations = 0;
  std::int64_t total_battery_violations = 0;
  double mean_avg_aoi_gap = 0.0;
  std::vector<double> checkpoint_times;
  std::vector<double> mean_age_gap;      // per checkpoint, variant minus parent
  std::vector<PairedPathReport> paths;
};

/// Run two configs path-by-path under common random numbers and compare
/// instantaneous age and battery at every checkpoint. The configs must agree
/// on everything except the policy, and the policies must be an
/// (original, energy-removal variant) pair or identical.
PairedReport run_paired(const SimConfig& parent, const SimConfig& variant,
                        int threads = 1);

/// Recompute renewal-cycle statistics from a recorded trace. Independent of
/// the engine's online cycle accounting (used as its oracle in tests).
/// horizon is in physical units like the trace.
std::vector<CycleStats> extract_cycles(std::span<const TraceEvent> trace, double horizon);

}  // namespace aoisim
