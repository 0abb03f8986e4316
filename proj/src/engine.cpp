#include "aoisim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>

#include "aoisim/aoi.hpp"
#include "aoisim/battery.hpp"
#include "aoisim/policy.hpp"

namespace aoisim {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Arrival: return "arrival";
    case EventKind::Attempt: return "attempt";
    case EventKind::Skip: return "skip";
    case EventKind::Deplete: return "deplete";
    case EventKind::CycleReset: return "cycle_reset";
  }
  return "?";
}

const char* to_string(AttemptOutcome outcome) {
  switch (outcome) {
    case AttemptOutcome::Success: return "success";
    case AttemptOutcome::Erased: return "erased";
    case AttemptOutcome::SkippedNoEnergy: return "skipped_no_energy";
  }
  return "?";
}

namespace {

// Engine side of one sample path: owns the battery, the age accounting, the
// checkpoint sampling, and the cycle/trace records. All PathContext times
// are internal; exported values are rescaled to physical units.
class PathRunner final : public PathContext {
 public:
  PathRunner(const SimConfig& cfg, ChannelOracle& channel)
      : cfg_(cfg), channel_(channel), scale_(cfg.lambda) {
    battery_.level = cfg.initial_energy;
    for (double t : cfg.checkpoint_times()) checkpoints_int_.push_back(t * scale_);
    track_cycles_ = is_energy_removal(cfg.policy.kind);
  }

  std::int64_t battery() const override { return battery_.level; }

  bool attempt(double t, std::int64_t epoch_index, int attempt_index) override {
    battery_ = battery_consume(battery_);
    aoi_.note_attempt();
    const bool success = channel_.draw(epoch_index, attempt_index);
    if (success) {
      aoi_.record_success(t);
      if (cfg_.record_trace) success_times_.push_back(t / scale_);
    }
    push_trace(t, EventKind::Attempt, epoch_index, attempt_index,
               success ? AttemptOutcome::Success : AttemptOutcome::Erased);
    return success;
  }

  void skip_no_energy(double t, std::int64_t epoch_index) override {
    push_trace(t, EventKind::Skip, epoch_index, 1, AttemptOutcome::SkippedNoEnergy);
  }

  void deplete(double t) override {
    battery_ = battery_deplete(battery_);
    push_trace(t, EventKind::Deplete, 0, 0, AttemptOutcome::SkippedNoEnergy);
  }

  void reduce_to_one(double t) override {
    battery_ = battery_reduce_to_one(battery_);
    push_trace(t, EventKind::CycleReset, 0, 0, AttemptOutcome::SkippedNoEnergy);
  }

  void mark_stage_boundary(double t) override {
    boundary_time_ = t;
    boundary_residual_ = aoi_.age_at(t);
  }

  void mark_cycle_reset(double t, std::int64_t stage2_epochs) override {
    cycles_.push_back(CycleStats{(*boundary_time_ - cycle_origin_) / scale_,
                                 (t - *boundary_time_) / scale_,
                                 boundary_residual_ / scale_, stage2_epochs, true});
    cycle_origin_ = t;
    boundary_time_.reset();
  }

  double last_success_time() const override { return aoi_.last_success_time(); }

  void deposit_arrival(double t) {
    battery_ = battery_deposit(battery_, 1);
    ++n_arrivals_;
    push_trace(t, EventKind::Arrival, n_arrivals_, 0, AttemptOutcome::SkippedNoEnergy);
  }

  // Sample every checkpoint strictly before t (events at a checkpoint's own
  // timestamp are processed before the sample is taken).
  void flush_checkpoints_before(double t) {
    while (next_checkpoint_ < checkpoints_int_.size() &&
           checkpoints_int_[next_checkpoint_] < t) {
      sample_checkpoint(checkpoints_int_[next_checkpoint_]);
      ++next_checkpoint_;
    }
  }

  PathResult finish(double horizon_int) {
    while (next_checkpoint_ < checkpoints_int_.size()) {
      sample_checkpoint(checkpoints_int_[next_checkpoint_]);
      ++next_checkpoint_;
    }
    PathResult result;
    result.time_avg_aoi = aoi_.finalize(horizon_int) / scale_;
    result.aoi_check_rel_err = aoi_.check_rel_err();
    result.n_success = aoi_.success_count();
    result.n_attempts = aoi_.attempt_count();
    result.n_arrivals = n_arrivals_;
    if (track_cycles_ && cycle_origin_ < horizon_int) {
      // Open cycle at the horizon: report what is known, flag incomplete.
      CycleStats open;
      open.completed = false;
      if (boundary_time_) {
        open.stage1_len = (*boundary_time_ - cycle_origin_) / scale_;
        open.stage2_len = (horizon_int - *boundary_time_) / scale_;
        open.residual_age = boundary_residual_ / scale_;
      } else {
        open.stage1_len = (horizon_int - cycle_origin_) / scale_;
      }
      cycles_.push_back(open);
    }
    result.checkpoints = std::move(checkpoint_stats_);
    result.cycles = std::move(cycles_);
    result.success_times = std::move(success_times_);
    result.trace = std::move(trace_);
    return result;
  }

 private:
  void sample_checkpoint(double t) {
    aoi_.integrate_to(t);
    CheckpointStat stat;
    stat.t = t / scale_;
    stat.time_avg_aoi = aoi_.closed_form_area(t) / t / scale_;
    stat.instantaneous_aoi = aoi_.age_at(t) / scale_;
    stat.battery = battery_.level;
    checkpoint_stats_.push_back(stat);
  }

  void push_trace(double t, EventKind kind, std::int64_t epoch, int attempt,
                  AttemptOutcome outcome) {
    if (!cfg_.record_trace) return;
    trace_.push_back(TraceEvent{t / scale_, kind, epoch, attempt, outcome, battery_.level});
  }

  const SimConfig& cfg_;
  ChannelOracle& channel_;
  double scale_;
  BatteryState battery_;
  AoiAccumulator aoi_;
  bool track_cycles_ = false;

  std::vector<double> checkpoints_int_;
  std::size_t next_checkpoint_ = 0;
  std::vector<CheckpointStat> checkpoint_stats_;

  double cycle_origin_ = 0.0;
  std::optional<double> boundary_time_;
  double boundary_residual_ = 0.0;
  std::vector<CycleStats> cycles_;

  std::int64_t n_arrivals_ = 0;
  std::vector<double> success_times_;
  std::vector<TraceEvent> trace_;
};

template <typename Fn>
void for_each_index(std::int64_t n, int threads, Fn fn) {
  if (threads <= 1 || n <= 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const int workers = static_cast<int>(std::min<std::int64_t>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::int64_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

EnsembleSummary summarize(std::vector<double> checkpoint_times,
                          std::vector<double> per_path_avg,
                          std::vector<std::vector<double>> per_path_series,
                          CycleMoments cycles) {
  EnsembleSummary summary;
  summary.n_paths = static_cast<std::int64_t>(per_path_avg.size());
  summary.mean = mean_of(per_path_avg);
  summary.stderr_mean = stderr_of(per_path_avg);
  summary.p10 = percentile_of(per_path_avg, 0.10);
  summary.p50 = percentile_of(per_path_avg, 0.50);
  summary.p90 = percentile_of(per_path_avg, 0.90);
  summary.series.reserve(checkpoint_times.size());
  std::vector<double> column(per_path_avg.size());
  for (std::size_t k = 0; k < checkpoint_times.size(); ++k) {
    for (std::size_t i = 0; i < per_path_series.size(); ++i) column[i] = per_path_series[i][k];
    SeriesStat stat;
    stat.t = checkpoint_times[k];
    stat.mean = mean_of(column);
    stat.stderr_mean = stderr_of(column);
    stat.p10 = percentile_of(column, 0.10);
    stat.p50 = percentile_of(column, 0.50);
    stat.p90 = percentile_of(column, 0.90);
    summary.series.push_back(stat);
  }
  summary.checkpoint_times = std::move(checkpoint_times);
  summary.per_path_avg = std::move(per_path_avg);
  summary.per_path_series = std::move(per_path_series);
  summary.cycles = std::move(cycles);
  return summary;
}

}  // namespace

PathResult run_path_with(const SimConfig& config, ArrivalSource& arrivals,
                         ChannelOracle& channel) {
  config.validate();
  const double scale = config.lambda;
  const double horizon_int = config.horizon * scale;

  PolicySpec internal_spec = config.policy;
  if (internal_spec.t0) *internal_spec.t0 *= scale;
  if (internal_spec.spacings) {
    for (double& x : internal_spec.spacings->prefix) x *= scale;
  }
  auto policy = make_policy(internal_spec, config.p);

  PathRunner runner(config, channel);
  double next_arrival = arrivals.next_gap();
  while (true) {
    const double scheduled = policy->next_scheduled();
    const double event_time = std::min(next_arrival, scheduled);
    if (!(event_time <= horizon_int)) break;
    runner.flush_checkpoints_before(event_time);
    if (next_arrival <= scheduled) {  // arrivals first on ties
      runner.deposit_arrival(next_arrival);
      policy->on_arrival(runner, next_arrival);
      next_arrival += arrivals.next_gap();
    } else {
      policy->on_scheduled(runner, scheduled);
    }
  }
  return runner.finish(horizon_int);
}

PathResult run_path(const SimConfig& config, std::uint64_t path_index) {
  RandomStreams streams(config.seed, path_index, config.p);
  return run_path_with(config, streams.arrivals, streams.channel);
}

EnsembleSummary run_ensemble_range(const SimConfig& config, std::int64_t first_path,
                                   std::int64_t last_path, int threads) {
  config.validate();
  const std::int64_t n = last_path - first_path;
  if (n < 1) throw std::invalid_argument("run_ensemble_range: empty path range");

  std::vector<PathResult> results(static_cast<std::size_t>(n));
  for_each_index(n, threads, [&](std::int64_t i) {
    results[static_cast<std::size_t>(i)] =
        run_path(config, static_cast<std::uint64_t>(first_path + i));
  });

  std::vector<double> per_path_avg;
  std::vector<std::vector<double>> per_path_series;
  per_path_avg.reserve(results.size());
  per_path_series.reserve(results.size());
  CycleMoments cycles;
  for (const PathResult& r : results) {
    per_path_avg.push_back(r.time_avg_aoi);
    std::vector<double> series;
    series.reserve(r.checkpoints.size());
    for (const CheckpointStat& c : r.checkpoints) series.push_back(c.time_avg_aoi);
    per_path_series.push_back(std::move(series));
    for (const CycleStats& c : r.cycles) {
      if (!c.completed) {
        ++cycles.n_incomplete;
        continue;
      }
      ++cycles.n_completed;
      cycles.stage1_len.add(c.stage1_len);
      cycles.stage2_len.add(c.stage2_len);
      cycles.residual_age.add(c.residual_age);
      cycles.stage2_epochs.add(static_cast<double>(c.stage2_epochs));
    }
  }
  return summarize(config.checkpoint_times(), std::move(per_path_avg),
                   std::move(per_path_series), std::move(cycles));
}

EnsembleSummary run_ensemble(const SimConfig& config, int threads) {
  return run_ensemble_range(config, 0, config.n_paths, threads);
}

EnsembleSummary merge_ensembles(const EnsembleSummary& a, const EnsembleSummary& b) {
  if (a.checkpoint_times != b.checkpoint_times) {
    throw std::invalid_argument("merge_ensembles: checkpoint grids differ");
  }
  std::vector<double> avg = a.per_path_avg;
  avg.insert(avg.end(), b.per_path_avg.begin(), b.per_path_avg.end());
  std::vector<std::vector<double>> series = a.per_path_series;
  series.insert(series.end(), b.per_path_series.begin(), b.per_path_series.end());
  CycleMoments cycles = a.cycles;
  cycles.stage1_len.merge(b.cycles.stage1_len);
  cycles.stage2_len.merge(b.cycles.stage2_len);
  cycles.residual_age.merge(b.cycles.residual_age);
  cycles.stage2_epochs.merge(b.cycles.stage2_epochs);
  cycles.n_completed += b.cycles.n_completed;
  cycles.n_incomplete += b.cycles.n_incomplete;
  return summarize(a.checkpoint_times, std::move(avg), std::move(series), std::move(cycles));
}

PairedReport run_paired(const SimConfig& parent, const SimConfig& variant, int threads) {
  parent.validate();
  variant.validate();
  const bool match_er = (parent.policy.kind == PolicyKind::Bu &&
                         variant.policy.kind == PolicyKind::BuEr) ||
                        (parent.policy.kind == PolicyKind::Bur &&
                         variant.policy.kind == PolicyKind::BurEr);
  const bool identical = parent.policy == variant.policy;
  if (!match_er && !identical) {
    throw std::invalid_argument(
        "run_paired: policies must be an (original, energy-removal) pair or identical");
  }
  if (parent.lambda != variant.lambda || parent.p != variant.p ||
      parent.horizon != variant.horizon || parent.seed != variant.seed ||
      parent.initial_energy != variant.initial_energy ||
      parent.n_paths != variant.n_paths || parent.checkpoints != variant.checkpoints) {
    throw std::invalid_argument("run_paired: configs must differ only in the policy");
  }

  const std::int64_t n = parent.n_paths;
  PairedReport report;
  report.n_paths = n;
  report.checkpoint_times = parent.checkpoint_times();
  report.mean_age_gap.assign(report.checkpoint_times.size(), 0.0);
  report.paths.resize(static_cast<std::size_t>(n));

  std::vector<std::vector<double>> age_gaps(static_cast<std::size_t>(n));
  for_each_index(n, threads, [&](std::int64_t i) {
    const PathResult a = run_path(parent, static_cast<std::uint64_t>(i));
    const PathResult b = run_path(variant, static_cast<std::uint64_t>(i));
    PairedPathReport& row = report.paths[static_cast<std::size_t>(i)];
    row.path_index = i;
    row.avg_aoi_gap = b.time_avg_aoi - a.time_avg_aoi;
    std::vector<double>& gaps = age_gaps[static_cast<std::size_t>(i)];
    gaps.reserve(a.checkpoints.size());
    for (std::size_t k = 0; k < a.checkpoints.size(); ++k) {
      const double age_a = a.checkpoints[k].instantaneous_aoi;
      const double age_b = b.checkpoints[k].instantaneous_aoi;
      gaps.push_back(age_b - age_a);
      const double tol = 1e-9 * std::max(1.0, std::abs(age_a));
      bool violated = false;
      if (age_b < age_a - tol) {
        ++row.aoi_violations;
        violated = true;
      }
      if (b.checkpoints[k].battery > a.checkpoints[k].battery) {
        ++row.battery_violations;
        violated = true;
      }
      if (violated && row.first_violation_time < 0.0) {
        row.first_violation_time = a.checkpoints[k].t;
      }
    }
  });

  // Reduce in path order so results are independent of thread scheduling.
  KahanSum avg_gap;
  std::vector<KahanSum> gap_sums(report.checkpoint_times.size());
  for (std::int64_t i = 0; i < n; ++i) {
    const PairedPathReport& row = report.paths[static_cast<std::size_t>(i)];
    report.total_aoi_violations += row.aoi_violations;
    report.total_battery_violations += row.battery_violations;
    avg_gap.add(row.avg_aoi_gap);
    const std::vector<double>& gaps = age_gaps[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < gaps.size(); ++k) gap_sums[k].add(gaps[k]);
  }
  report.mean_avg_aoi_gap = avg_gap.value() / static_cast<double>(n);
  for (std::size_t k = 0; k < gap_sums.size(); ++k) {
    report.mean_age_gap[k] = gap_sums[k].value() / static_cast<double>(n);
  }
  return report;
}

std::vector<CycleStats> extract_cycles(std::span<const TraceEvent> trace, double horizon) {
  std::vector<CycleStats> cycles;
  double origin = 0.0;
  double last_success = 0.0;
  std::optional<double> boundary;
  double residual = 0.0;
  std::int64_t stage2_epochs = 0;
  std::int64_t last_stage2_epoch = -1;

  for (const TraceEvent& ev : trace) {
    switch (ev.kind) {
      case EventKind::Attempt:
        if (ev.outcome == AttemptOutcome::Success) last_success = ev.time;
        if (!boundary && ev.battery_after == 0) {
          boundary = ev.time;
          residual = ev.time - last_success;
        }
        break;
      case EventKind::Deplete:
        if (!boundary) {
          boundary = ev.time;
          residual = ev.time - last_success;
        }
        break;
      case EventKind::CycleReset: {
        const double b = boundary.value_or(ev.time);  // resets always follow a boundary
        cycles.push_back(CycleStats{b - origin, ev.time - b, residual, stage2_epochs, true});
        origin = ev.time;
        boundary.reset();
        stage2_epochs = 0;
        last_stage2_epoch = -1;
        break;
      }
      default:
        break;
    }
    if (boundary && ev.time > *boundary &&
        (ev.kind == EventKind::Attempt || ev.kind == EventKind::Skip) &&
        ev.epoch_index != last_stage2_epoch) {
      ++stage2_epochs;
      last_stage2_epoch = ev.epoch_index;
    }
  }
  if (origin < horizon) {
    CycleStats open;
    open.completed = false;
    if (boundary) {
      open.stage1_len = *boundary - origin;
      open.stage2_len = horizon - *boundary;
      open.residual_age = residual;
    } else {
      open.stage1_len = horizon - origin;
    }
    cycles.push_back(open);
  }
  return cycles;
}

}  // namespace aoisim
