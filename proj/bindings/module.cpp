#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "aoisim/analysis.hpp"
#include "aoisim/config.hpp"
#include "aoisim/engine.hpp"
#include "aoisim/version.hpp"

namespace py = pybind11;
using namespace aoisim;

namespace {

SimConfig make_config(const std::string& policy, double p, double horizon, double lambda,
                      std::int64_t e0, std::optional<double> t0, std::int64_t paths,
                      std::uint64_t seed, int checkpoints, bool record_trace,
                      std::optional<std::vector<double>> spacings,
                      const std::string& spacing_tail) {
  SimConfig cfg;
  cfg.policy.kind = policy_from_string(policy);
  cfg.p = p;
  cfg.horizon = horizon;
  cfg.lambda = lambda;
  cfg.initial_energy = e0;
  cfg.policy.t0 = t0;
  cfg.n_paths = paths;
  cfg.seed = seed;
  cfg.checkpoints = checkpoints;
  cfg.record_trace = record_trace;
  if (spacings) {
    SpacingRule rule;
    rule.prefix = *spacings;
    if (spacing_tail == "constant") {
      rule.tail = SpacingRule::Tail::Constant;
    } else if (spacing_tail == "arithmetic") {
      rule.tail = SpacingRule::Tail::Arithmetic;
    } else if (spacing_tail == "geometric") {
      rule.tail = SpacingRule::Tail::Geometric;
    } else {
      throw std::invalid_argument("spacing_tail must be constant/arithmetic/geometric");
    }
    cfg.policy.spacings = rule;
  }
  cfg.feedback = required_feedback(cfg.policy.kind);
  cfg.validate();
  return cfg;
}

SpacingRule make_rule(const std::vector<double>& prefix, const std::string& tail) {
  SpacingRule rule;
  rule.prefix = prefix;
  if (tail == "constant") {
    rule.tail = SpacingRule::Tail::Constant;
  } else if (tail == "arithmetic") {
    rule.tail = SpacingRule::Tail::Arithmetic;
  } else if (tail == "geometric") {
    rule.tail = SpacingRule::Tail::Geometric;
  } else {
    throw std::invalid_argument("tail must be constant/arithmetic/geometric");
  }
  rule.validate();
  return rule;
}

}  // namespace

PYBIND11_MODULE(aoisim, m) {
  m.doc() = "Monte Carlo simulator and bound toolkit for status-update age "
            "minimization by an energy-harvesting source over an erasure channel";
  m.attr("__version__") = kVersion;

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<SimulationError>(m, "SimulationError");

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init(&make_config), py::arg("policy"), py::arg("p"), py::arg("horizon"),
           py::arg("lam") = 1.0, py::arg("e0") = 1, py::arg("t0") = std::nullopt,
           py::arg("paths") = 1, py::arg("seed") = 0, py::arg("checkpoints") = 32,
           py::arg("record_trace") = false, py::arg("spacings") = std::nullopt,
           py::arg("spacing_tail") = "constant")
      .def_readonly("p", &SimConfig::p)
      .def_readonly("horizon", &SimConfig::horizon)
      .def_readonly("lam", &SimConfig::lambda)
      .def_readonly("e0", &SimConfig::initial_energy)
      .def_readonly("paths", &SimConfig::n_paths)
      .def_readonly("seed", &SimConfig::seed)
      .def("__repr__", [](const SimConfig& c) {
        return "<SimConfig " + cell_label(c) + ">";
      });

  py::class_<CheckpointStat>(m, "CheckpointStat")
      .def_readonly("t", &CheckpointStat::t)
      .def_readonly("time_avg_aoi", &CheckpointStat::time_avg_aoi)
      .def_readonly("instantaneous_aoi", &CheckpointStat::instantaneous_aoi)
      .def_readonly("battery", &CheckpointStat::battery);

  py::class_<CycleStats>(m, "CycleStats")
      .def_readonly("stage1_len", &CycleStats::stage1_len)
      .def_readonly("stage2_len", &CycleStats::stage2_len)
      .def_readonly("residual_age", &CycleStats::residual_age)
      .def_readonly("stage2_epochs", &CycleStats::stage2_epochs)
      .def_readonly("completed", &CycleStats::completed);

  py::class_<PathResult>(m, "PathResult")
      .def_readonly("time_avg_aoi", &PathResult::time_avg_aoi)
      .def_readonly("n_success", &PathResult::n_success)
      .def_readonly("n_attempts", &PathResult::n_attempts)
      .def_readonly("n_arrivals", &PathResult::n_arrivals)
      .def_readonly("checkpoints", &PathResult::checkpoints)
      .def_readonly("cycles", &PathResult::cycles)
      .def_readonly("success_times", &PathResult::success_times);

  py::class_<SeriesStat>(m, "SeriesStat")
      .def_readonly("t", &SeriesStat::t)
      .def_readonly("mean", &SeriesStat::mean)
      .def_readonly("stderr_mean", &SeriesStat::stderr_mean)
      .def_readonly("p10", &SeriesStat::p10)
      .def_readonly("p50", &SeriesStat::p50)
      .def_readonly("p90", &SeriesStat::p90);

  py::class_<EnsembleSummary>(m, "EnsembleSummary")
      .def_readonly("n_paths", &EnsembleSummary::n_paths)
      .def_readonly("mean", &EnsembleSummary::mean)
      .def_readonly("stderr_mean", &EnsembleSummary::stderr_mean)
      .def_readonly("p10", &EnsembleSummary::p10)
      .def_readonly("p50", &EnsembleSummary::p50)
      .def_readonly("p90", &EnsembleSummary::p90)
      .def_readonly("per_path_avg", &EnsembleSummary::per_path_avg)
      .def_readonly("series", &EnsembleSummary::series);

  py::class_<PairedPathReport>(m, "PairedPathReport")
      .def_readonly("path_index", &PairedPathReport::path_index)
      .def_readonly("aoi_violations", &PairedPathReport::aoi_violations)
      .def_readonly("battery_violations", &PairedPathReport::battery_violations)
      .def_readonly("avg_aoi_gap", &PairedPathReport::avg_aoi_gap);

  py::class_<PairedReport>(m, "PairedReport")
      .def_readonly("n_paths", &PairedReport::n_paths)
      .def_readonly("total_aoi_violations", &PairedReport::total_aoi_violations)
      .def_readonly("total_battery_violations", &PairedReport::total_battery_violations)
      .def_readonly("mean_avg_aoi_gap", &PairedReport::mean_avg_aoi_gap)
      .def_readonly("paths", &PairedReport::paths);

  py::class_<RenewalObjective>(m, "RenewalObjective")
      .def_readonly("value", &RenewalObjective::value)
      .def_readonly("feasible", &RenewalObjective::feasible)
      .def_readonly("mean_spacing", &RenewalObjective::mean_spacing)
      .def_readonly("mean_square", &RenewalObjective::mean_square);

  py::class_<SpacingRule>(m, "SpacingRule")
      .def(py::init(&make_rule), py::arg("prefix"), py::arg("tail") = "constant")
      .def_static("constant", &SpacingRule::constant)
      .def_static("linear", &SpacingRule::linear)
      .def("at", &SpacingRule::at);

  m.def("run_path", &run_path, py::arg("config"), py::arg("path_index") = 0,
        py::call_guard<py::gil_scoped_release>());
  m.def("run_ensemble", &run_ensemble, py::arg("config"), py::arg("threads") = 1,
        py::call_guard<py::gil_scoped_release>());
  m.def("run_paired", &run_paired, py::arg("parent"), py::arg("variant"),
        py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());

  m.def("lower_bound_no_feedback", &lower_bound_no_feedback, py::arg("p"));
  m.def("lower_bound_feedback", &lower_bound_feedback, py::arg("p"));
  m.def("geometric_moments", [](double p) {
    const GeometricMoments gm = geometric_moments(p);
    return py::make_tuple(gm.mean, gm.second_moment);
  }, py::arg("p"));
  m.def("renewal_objective", &renewal_objective, py::arg("spacings"), py::arg("p"),
        py::arg("tail_mass_tol") = 1e-15);
  m.def("stage1_hitting_bound_unit", &stage1_hitting_bound_unit, py::arg("alpha"));
  m.def("stage1_hitting_bound_retransmit", &stage1_hitting_bound_retransmit,
        py::arg("alpha"), py::arg("p"));
}
