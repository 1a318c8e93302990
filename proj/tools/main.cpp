// Experiment runner around the driftless control core: parses a JSON problem
// config, executes the requested runs and writes CSV/text artifacts.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "driftless/experiment.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  int checkpoints = 0;
  double h_max = -1.0;
  bool parallel = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_run_options) {
  cmd->add_option("config", opts.config_path, "JSON experiment config")->required();
  cmd->add_option("--out", opts.out_dir, "output directory (overrides the config)");
  if (with_run_options) {
    cmd->add_option("--checkpoints", opts.checkpoints, "override the checkpoint count")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--h-max", opts.h_max, "override the integrator substep cap")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--parallel", opts.parallel, "execute independent runs concurrently");
  }
}

driftless::ExperimentConfig load(const CommonOptions& opts) {
  driftless::ExperimentConfig cfg = driftless::parse_config(opts.config_path);
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (opts.checkpoints > 0) cfg.n_checkpoints = opts.checkpoints;
  if (opts.h_max > 0.0) cfg.h_max = opts.h_max;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Piecewise-constant control synthesis for nonlinear systems"};
  app.require_subcommand(1);

  CommonOptions run_opts, feas_opts, cmp_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "execute the runs requested by the config");
  add_common(run_cmd, run_opts, true);
  CLI::App* feas_cmd =
      app.add_subcommand("feasibility", "write the feasibility report only, no simulation");
  add_common(feas_cmd, feas_opts, false);
  CLI::App* cmp_cmd = app.add_subcommand(
      "compare", "closed loop vs. linear state feedback (raw and clamped), joint summary");
  add_common(cmp_cmd, cmp_opts, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      return driftless::run_experiment(load(run_opts), run_opts.parallel);
    }
    if (feas_cmd->parsed()) {
      return driftless::run_feasibility(load(feas_opts));
    }
    driftless::ExperimentConfig cfg = load(cmp_opts);
    cfg.runs = {driftless::RunKind::closed_loop, driftless::RunKind::baseline,
                driftless::RunKind::baseline_clamped};
    return driftless::run_experiment(cfg, cmp_opts.parallel);
  } catch (const driftless::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return driftless::kExitConfigError;
  } catch (const driftless::InvalidProblem& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return driftless::kExitConfigError;
  } catch (const driftless::Diverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return driftless::kExitDiverged;
  } catch (const driftless::BaselineSynthesisFailed& e) {
    std::cerr << "error: " << e.what() << "\n";
    return driftless::kExitBaselineFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
