#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "driftless/models.hpp"
#include "driftless/schedule.hpp"
#include "driftless/synthesis.hpp"

namespace driftless {

/// One simulation problem: drive model from x0 toward xtg under the
/// piecewise-constant schedule.
struct ProblemSpec {
  SystemModel model;
  Vec x0;
  Vec xtg;
  double t_star = 0.0;  // harmonic design parameter
  ScheduleKind schedule_kind = ScheduleKind::harmonic;
  double t_final = 0.0;  // geometric parameters
  double ratio = 0.0;
  int n_checkpoints = 200;
  double h_max = 0.0;      // integrator substep cap; 0 selects the default policy
  double epsilon = 0.05;   // reporting tolerance on |xtg - x|_inf

  CheckpointSchedule make_schedule() const;

  /// min(1e-3 * horizon scale, last interval / 16), so the shortest interval
  /// keeps at least 16 substeps.
  double effective_h_max(const CheckpointSchedule& schedule) const;

  void validate() const;  // InvalidProblem on dimension/parameter issues
};

struct DenseSample {
  double t = 0.0;
  Vec x;
  Vec u;  // input in effect on the interval ending at this sample
};

struct CheckpointRecord {
  int n = 0;
  double t_n = 0.0;
  double dt_n = 0.0;
  Vec x_n;
  double err_inf = 0.0;
  std::optional<double> vbar_n;  // certificate bound, when Lipschitz data exists
  Vec u_n;
  double u_inf_max_so_far = 0.0;
};

struct TrajectoryRecord {
  std::vector<DenseSample> samples;  // decimated to at most 100000 rows
  std::vector<CheckpointRecord> checkpoints;
  std::vector<double> intra_interval_err_max;  // per interval n, entry n-1
  double u_inf_max = 0.0;
  bool constraint_satisfied = false;

  double final_err_inf() const {
    return checkpoints.empty() ? 0.0 : checkpoints.back().err_inf;
  }
};

/// Non-finite state encountered while integrating; carries the time of the
/// failed step and whatever record had been accumulated.
struct Diverged : Error {
  Diverged(double t_at, std::shared_ptr<const TrajectoryRecord> partial_record);
  double t;
  std::shared_ptr<const TrajectoryRecord> partial;
};

/// Classical fixed-step RK4 over [t0, t1] under a constant input, substep
/// h = (t1 - t0)/ceil((t1 - t0)/h_max), landing exactly on t1. Returns the
/// final state and the interior samples (excluding t0).
std::pair<Vec, std::vector<DenseSample>> integrate_segment(const SystemModel& model,
                                                           const Vec& x_start, const Vec& u_const,
                                                           double t0, double t1, double h_max);

/// Integrate the driftless surrogate xdot = g(x0) u under the first-interval
/// minimum-energy input. Under full row rank the final state matches xtg to
/// integrator precision; otherwise the final error is the rank-deficiency
/// residual.
TrajectoryRecord run_driftless(const ProblemSpec& spec);

/// The proposed controller: per schedule interval, a constant minimum-energy
/// input recomputed from the checkpoint state, applied to the full nonlinear
/// dynamics.
TrajectoryRecord run_closed_loop(const ProblemSpec& spec);

/// Linear state feedback baseline sampled at integrator substeps; checkpoints
/// are evaluated at the same schedule times for comparability.
TrajectoryRecord run_baseline(const ProblemSpec& spec, bool clamped);

}  // namespace driftless
