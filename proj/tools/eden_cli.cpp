// Experiment runner for the two-timescale associative memory library.
//
// Subcommands: simulate | escape | phase | capacity | fixed-points.
// Each takes a flat JSON config (--config), --key=value overrides, and
// writes plot-ready CSVs plus a metadata.json that reproduces the run.

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "eden/experiments.hpp"
#include "eden/log.hpp"
#include "eden/version.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  long long seed = -1;
  long long jobs = -1;
  std::string model;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config (or metadata.json of a previous run)");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "base RNG seed");
  cmd->add_option("--jobs", args.jobs, "worker thread cap (0 = all cores)");
  cmd->add_option("--model", args.model, "eden | reference");
  cmd->allow_extras();  // --key=value config overrides
}

int run(const std::string& experiment, const CommonArgs& args,
        const std::vector<std::string>& extras) {
  eden::ExperimentConfig cfg =
      args.config_path.empty()
          ? eden::ExperimentConfig::defaults(experiment)
          : eden::ExperimentConfig::from_file(args.config_path, experiment);
  if (args.seed >= 0) cfg.override_value("seed", std::to_string(args.seed));
  if (args.jobs >= 0) cfg.override_value("jobs", std::to_string(args.jobs));
  if (!args.model.empty()) cfg.override_value("model", args.model);
  for (const std::string& extra : extras) {
    if (extra.rfind("--", 0) != 0) {
      throw std::invalid_argument("unrecognized argument: " + extra);
    }
    const auto eq = extra.find('=');
    if (eq == std::string::npos || eq == 2) {
      throw std::invalid_argument("overrides must look like --key=value: " + extra);
    }
    cfg.override_value(extra.substr(2, eq - 2), extra.substr(eq + 1));
  }
  cfg.validate();

  const auto result = eden::run_experiment(cfg, args.out_dir);
  for (const auto& f : result.output_files) std::cout << f << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-timescale dense associative memory experiments"};
  app.set_version_flag("--version", std::string(eden::library_version));
  app.require_subcommand(1);

  const std::vector<std::string> names = {"simulate", "escape", "phase",
                                          "capacity", "fixed-points"};
  const std::vector<std::string> descriptions = {
      "integrate one trajectory and export overlaps/energy/argmax",
      "measure escape times and compare with the analytic prediction",
      "sweep the (alpha_s/alpha_c, tau_d/tau_f) phase diagram",
      "Monte Carlo single-bit error and capacity search",
      "track frozen-s fixed points along a trajectory with PC1 scores"};

  std::vector<CommonArgs> args(names.size());
  std::vector<CLI::App*> cmds;
  for (std::size_t i = 0; i < names.size(); ++i) {
    CLI::App* cmd = app.add_subcommand(names[i], descriptions[i]);
    add_common(cmd, args[i]);
    cmds.push_back(cmd);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (cmds[i]->parsed()) {
        return run(names[i], args[i], cmds[i]->remaining());
      }
    }
    std::cerr << "no subcommand given\n";
    return 1;
  } catch (const std::exception& e) {
    eden::log_error(e.what());
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
