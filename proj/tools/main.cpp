#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aoisim/config.hpp"
#include "aoisim/orchestrate.hpp"
#include "aoisim/version.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  int threads = 1;
  std::optional<std::uint64_t> seed;
  std::optional<int> checkpoints;
  bool trace = false;
  bool no_trace = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config_path, "Experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", args.out_dir, "Output directory")->required();
  cmd->add_option("-j,--threads", args.threads, "Worker threads  [1]");
  cmd->add_option("--seed", args.seed, "Override the master seed");
  cmd->add_option("--checkpoints", args.checkpoints, "Override the checkpoint count");
  cmd->add_flag("--trace", args.trace, "Record and dump full event traces");
  cmd->add_flag("--no-trace", args.no_trace, "Disable trace recording");
}

aoisim::RunOptions to_options(const CommonArgs& args) {
  aoisim::RunOptions options;
  options.out_dir = args.out_dir;
  options.threads = args.threads;
  options.seed_override = args.seed;
  options.checkpoints_override = args.checkpoints;
  if (args.trace) options.trace_override = true;
  if (args.no_trace) options.trace_override = false;
  return options;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aoisim: status-update age simulation and bound toolkit"};
  app.set_version_flag("--version", std::string("aoisim ") + aoisim::kVersion);
  app.require_subcommand(1);

  CommonArgs run_args;
  CLI::App* run = app.add_subcommand("run", "Run an experiment sweep");
  add_common(run, run_args);

  std::vector<double> bounds_p;
  std::string bounds_out;
  CLI::App* bounds = app.add_subcommand("bounds", "Print the closed-form age bounds");
  bounds->add_option("-p,--p", bounds_p, "Success probabilities")
      ->required()
      ->delimiter(',');
  bounds->add_option("-o,--out", bounds_out, "Write the table to a file instead of stdout");

  CommonArgs paired_args;
  std::string pair_spec = "bu,bu_er";
  CLI::App* paired =
      app.add_subcommand("paired", "Common-random-number dominance comparison");
  add_common(paired, paired_args);
  paired->add_option("--pair", pair_spec,
                     "Parent,variant policies (e.g. bu,bu_er or bur,bur_er)");

  CommonArgs cycles_args;
  CLI::App* cycles = app.add_subcommand("cycles", "Renewal-cycle statistics per T0");
  add_common(cycles, cycles_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : aoisim::kExitConfigError;
  }

  try {
    if (run->parsed()) {
      const auto experiment = aoisim::parse_config_file(run_args.config_path);
      return aoisim::cmd_run(experiment, to_options(run_args), std::cout);
    }
    if (bounds->parsed()) {
      if (bounds_out.empty()) return aoisim::cmd_bounds(bounds_p, std::cout);
      std::ofstream out(bounds_out);
      if (!out) throw aoisim::ConfigError("cannot write '" + bounds_out + "'");
      return aoisim::cmd_bounds(bounds_p, out);
    }
    if (paired->parsed()) {
      const std::size_t comma = pair_spec.find(',');
      if (comma == std::string::npos) {
        throw aoisim::ConfigError("--pair expects 'parent,variant'");
      }
      const auto parent = aoisim::policy_from_string(pair_spec.substr(0, comma));
      const auto variant = aoisim::policy_from_string(pair_spec.substr(comma + 1));
      const auto experiment = aoisim::parse_config_file(paired_args.config_path);
      return aoisim::cmd_paired(experiment, parent, variant, to_options(paired_args),
                                std::cout);
    }
    if (cycles->parsed()) {
      const auto experiment = aoisim::parse_config_file(cycles_args.config_path);
      return aoisim::cmd_cycles(experiment, to_options(cycles_args), std::cout);
    }
  } catch (const aoisim::EnergyCausalityError& e) {
    std::cerr << "simulation invariant violated: " << e.what() << "\n";
    return aoisim::kExitSimulationError;
  } catch (const aoisim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return aoisim::kExitConfigError;
  } catch (const aoisim::SimulationError& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return aoisim::kExitSimulationError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return aoisim::kExitConfigError;
  }
  return aoisim::kExitConfigError;
}
