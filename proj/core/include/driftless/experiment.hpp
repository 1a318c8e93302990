#pragma once

#include <string>
#include <vector>

#include "driftless/simulator.hpp"

namespace driftless {

enum class RunKind { closed_loop, driftless, baseline, baseline_clamped };

const char* run_kind_name(RunKind k);

/// Process exit codes shared by the library-level runner and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDiverged = 3;
inline constexpr int kExitBaselineFailed = 4;

struct ModelParams {
  std::string name;
  double mu = 0.2;  // vdp
  double m1 = 0.3, m2 = 0.4, l1 = 0.2, l2 = 0.5, g_acc = 9.81;  // two_link
};

struct ExperimentConfig {
  ModelParams model;
  Vec x0;
  Vec xtg;
  double t_star = 0.0;
  ScheduleKind schedule_kind = ScheduleKind::harmonic;
  double t_final = 0.0;
  double ratio = 0.0;
  int n_checkpoints = 200;
  double h_max = 0.0;
  double epsilon = 0.05;
  std::vector<RunKind> runs{RunKind::closed_loop};
  std::string out_dir = "out";

  SystemModel make_model() const;
  ProblemSpec make_problem() const;  // InvalidProblem on dimension mismatch
};

/// Parse and validate a JSON experiment config. Unknown keys are rejected;
/// ConfigError messages name the offending file and key.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& source_name);

struct RunOutcome {
  RunKind kind = RunKind::closed_loop;
  bool completed = false;
  bool diverged = false;
  bool baseline_failed = false;
  double final_err_inf = 0.0;
  bool constraint_satisfied = false;
  bool reached_epsilon = false;
};

/// Execute the configured runs and write the artifact set into out_dir:
/// <run>_trajectory.csv, <run>_checkpoints.csv, feasibility.txt, summary.txt.
/// Returns a process exit code. With parallel = true the runs execute
/// concurrently; artifacts are identical either way.
int run_experiment(const ExperimentConfig& cfg, bool parallel = false);

/// Write feasibility.txt only (no simulation). Returns an exit code.
int run_feasibility(const ExperimentConfig& cfg);

/// Number formatting used in all artifacts: shortest round-trippable form
/// with 17 significant digits.
std::string format_g17(double v);

}  // namespace driftless
