#include "aoisim/orchestrate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "aoisim/analysis.hpp"
#include "aoisim/engine.hpp"
#include "aoisim/stats.hpp"

namespace aoisim {
namespace {

namespace fs = std::filesystem;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write output file '" + path.string() + "'");
  return out;
}

ExperimentConfig apply_overrides(ExperimentConfig experiment, const RunOptions& options) {
  if (options.seed_override) experiment.seed = *options.seed_override;
  if (options.checkpoints_override) experiment.checkpoints = *options.checkpoints_override;
  if (options.trace_override) experiment.record_trace = *options.trace_override;
  return experiment;
}

double cell_bound(const SimConfig& cell) {
  const double unit = cell.feedback == Feedback::Perfect ? lower_bound_feedback(cell.p)
                                                         : lower_bound_no_feedback(cell.p);
  return unit / cell.lambda;
}

std::string t0_field(const SimConfig& cell) {
  return cell.policy.t0 ? num(*cell.policy.t0) : std::string();
}

void dump_traces(const SimConfig& cell, const fs::path& path) {
  std::ofstream out = open_out(path);
  out << "path,time,kind,epoch,attempt,outcome,battery\n";
  for (std::int64_t i = 0; i < cell.n_paths; ++i) {
    const PathResult result = run_path(cell, static_cast<std::uint64_t>(i));
    for (const TraceEvent& ev : result.trace) {
      out << i << ',' << num(ev.time) << ',' << to_string(ev.kind) << ',' << ev.epoch_index
          << ',' << ev.attempt_index << ','
          << (ev.kind == EventKind::Attempt || ev.kind == EventKind::Skip
                  ? to_string(ev.outcome)
                  : "")
          << ',' << ev.battery_after << '\n';
    }
  }
}

}  // namespace

int cmd_run(const ExperimentConfig& experiment, const RunOptions& options,
            std::ostream& log) {
  const ExperimentConfig resolved = apply_overrides(experiment, options);
  const std::vector<SimConfig> cells = resolved.expand();
  fs::create_directories(options.out_dir);

  {
    std::ofstream manifest = open_out(options.out_dir / "manifest.txt");
    write_manifest(manifest, resolved);
  }
  std::ofstream longf = open_out(options.out_dir / "curves_long.csv");
  longf << "policy,p,t0,t,mean,stderr,bound,gap\n";
  std::ofstream summaryf = open_out(options.out_dir / "summary.csv");
  summaryf << "policy,p,t0,n_paths,horizon,mean,stderr,p10,p50,p90,bound,gap,"
              "below_bound_flag\n";

  bool any_below = false;
  for (const SimConfig& cell : cells) {
    const std::string label = cell_label(cell);
    log << "running " << label << " (" << cell.n_paths << " paths, T=" << num(cell.horizon)
        << ")\n";
    const EnsembleSummary summary = run_ensemble(cell, options.threads);
    const double bound = cell_bound(cell);
    const BoundReport report = compare_to_bound(summary, bound, cell.p);
    any_below = any_below || report.significantly_below;

    std::ofstream curve = open_out(options.out_dir / ("curve_" + label + ".csv"));
    curve << "t,mean,stderr,bound,gap\n";
    for (std::size_t k = 0; k < summary.series.size(); ++k) {
      const SeriesStat& s = summary.series[k];
      curve << num(s.t) << ',' << num(s.mean) << ',' << num(s.stderr_mean) << ','
            << num(bound) << ',' << num(report.gap_by_checkpoint[k]) << '\n';
      longf << to_string(cell.policy.kind) << ',' << num(cell.p) << ',' << t0_field(cell)
            << ',' << num(s.t) << ',' << num(s.mean) << ',' << num(s.stderr_mean) << ','
            << num(bound) << ',' << num(report.gap_by_checkpoint[k]) << '\n';
    }
    summaryf << to_string(cell.policy.kind) << ',' << num(cell.p) << ',' << t0_field(cell)
             << ',' << cell.n_paths << ',' << num(cell.horizon) << ',' << num(summary.mean)
             << ',' << num(summary.stderr_mean) << ',' << num(summary.p10) << ','
             << num(summary.p50) << ',' << num(summary.p90) << ',' << num(bound) << ','
             << num(report.gap_final) << ',' << (report.significantly_below ? 1 : 0)
             << '\n';
    if (report.significantly_below) {
      log << "  WARNING: mean dips below bound-3*stderr at checkpoint "
          << report.first_below_checkpoint << "\n";
    }
    if (cell.record_trace) {
      dump_traces(cell, options.out_dir / ("trace_" + label + ".csv"));
    }
  }
  return any_below ? kExitThresholdFailure : kExitOk;
}

int cmd_bounds(const std::vector<double>& p_values, std::ostream& out) {
  if (p_values.empty()) throw ConfigError("bounds: at least one p is required");
  for (double p : p_values) {
    if (!(p > 0.0) || p > 1.0) {
      throw ConfigError("bounds: p must be in (0, 1], got " + num(p));
    }
  }
  out << "p,lb_no_feedback,lb_feedback\n";
  for (double p : p_values) {
    out << num(p) << ',' << num(lower_bound_no_feedback(p)) << ','
        << num(lower_bound_feedback(p)) << '\n';
  }
  return kExitOk;
}

int cmd_paired(const ExperimentConfig& experiment, PolicyKind parent, PolicyKind variant,
               const RunOptions& options, std::ostream& log) {
  const ExperimentConfig resolved = apply_overrides(experiment, options);
  if (resolved.p_values.size() != 1) {
    throw ConfigError("paired: config must contain exactly one p");
  }
  const double p = resolved.p_values.front();
  std::optional<double> parent_t0, variant_t0;
  const auto pick_t0 = [&](PolicyKind kind) -> std::optional<double> {
    if (!is_energy_removal(kind)) return std::nullopt;
    if (resolved.t0_values.size() != 1) {
      throw ConfigError("paired: config must contain exactly one t0 for ER policies");
    }
    return resolved.t0_values.front();
  };
  parent_t0 = pick_t0(parent);
  variant_t0 = pick_t0(variant);

  const SimConfig cell_a = make_cell(resolved, parent, p, parent_t0);
  const SimConfig cell_b = make_cell(resolved, variant, p, variant_t0);
  cell_a.validate();
  cell_b.validate();

  const PairedReport report = run_paired(cell_a, cell_b, options.threads);

  fs::create_directories(options.out_dir);
  const std::string label = cell_label(cell_a) + "_vs_" + cell_label(cell_b);
  std::ofstream perpath = open_out(options.out_dir / ("paired_" + label + ".csv"));
  perpath << "path,aoi_violations,battery_violations,first_violation_t,avg_aoi_gap\n";
  for (const PairedPathReport& row : report.paths) {
    perpath << row.path_index << ',' << row.aoi_violations << ',' << row.battery_violations
            << ',' << (row.first_violation_time < 0 ? std::string() : num(row.first_violation_time))
            << ',' << num(row.avg_aoi_gap) << '\n';
  }
  std::ofstream gaps = open_out(options.out_dir / ("paired_gap_" + label + ".csv"));
  gaps << "t,mean_age_gap\n";
  for (std::size_t k = 0; k < report.checkpoint_times.size(); ++k) {
    gaps << num(report.checkpoint_times[k]) << ',' << num(report.mean_age_gap[k]) << '\n';
  }

  log << "paired " << label << ": " << report.total_aoi_violations << " age violations, "
      << report.total_battery_violations << " battery violations over " << report.n_paths
      << " paths; mean avg-age gap " << num(report.mean_avg_aoi_gap) << "\n";
  const bool clean =
      report.total_aoi_violations == 0 && report.total_battery_violations == 0;
  return clean ? kExitOk : kExitThresholdFailure;
}

int cmd_cycles(const ExperimentConfig& experiment, const RunOptions& options,
               std::ostream& log) {
  const ExperimentConfig resolved = apply_overrides(experiment, options);
  for (PolicyKind kind : resolved.policies) {
    if (!is_energy_removal(kind)) {
      throw ConfigError(std::string("cycles: policy '") + to_string(kind) +
                        "' has no renewal-cycle structure");
    }
  }
  const std::vector<SimConfig> cells = resolved.expand();
  fs::create_directories(options.out_dir);
  std::ofstream out = open_out(options.out_dir / "cycles.csv");
  out << "policy,p,t0,n_cycles,n_incomplete,stage1_mean,stage1_se,stage2_mean,stage2_se,"
         "residual_mean,residual_se,stage2_epochs_mean,stage2_epochs_var,geom_gap,"
         "geom_gap_se,stage2_mean_genie_cap\n";
  for (const SimConfig& cell : cells) {
    log << "cycles " << cell_label(cell) << "\n";
    const EnsembleSummary summary = run_ensemble(cell, options.threads);
    const CycleMoments& cm = summary.cycles;
    const GeometricRelationGap geom = geometric_relation_gap(cm.stage2_epochs);
    // Mean stage-two length cap from the genie-aided comparison process for
    // the no-feedback variant: 1 / (p (1 - 2/e)) unit epochs.
    std::string cap;
    if (cell.policy.kind == PolicyKind::BuEr) {
      cap = num(1.0 / (cell.p * (1.0 - 2.0 * std::exp(-1.0))) / cell.lambda);
    }
    out << to_string(cell.policy.kind) << ',' << num(cell.p) << ',' << t0_field(cell) << ','
        << cm.n_completed << ',' << cm.n_incomplete << ',' << num(cm.stage1_len.mean())
        << ',' << num(cm.stage1_len.stderr_mean()) << ',' << num(cm.stage2_len.mean())
        << ',' << num(cm.stage2_len.stderr_mean()) << ',' << num(cm.residual_age.mean())
        << ',' << num(cm.residual_age.stderr_mean()) << ','
        << num(cm.stage2_epochs.mean()) << ',' << num(cm.stage2_epochs.variance()) << ','
        << num(geom.gap) << ',' << num(geom.stderr_gap) << ',' << cap << '\n';
  }
  return kExitOk;
}

}  // namespace aoisim
