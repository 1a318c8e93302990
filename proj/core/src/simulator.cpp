#include "driftless/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace driftless {

namespace {

constexpr double kConstraintTol = 1e-12;
constexpr std::size_t kDenseSampleBudget = 100000;

Vec rk4_step(const SystemModel& model, const Vec& x, const Vec& u, double h) {
  const auto xdot = [&](const Vec& s) { return model.drift(s) + model.input_map(s) * u; };
  const Vec k1 = xdot(x);
  const Vec k2 = xdot(x + (0.5 * h) * k1);
  const Vec k3 = xdot(x + (0.5 * h) * k2);
  const Vec k4 = xdot(x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Uniform decimation of dense samples to the budget; checkpoint samples are
// always kept so checkpoint rows can be cross-checked against the trajectory.
class SampleSink {
 public:
  SampleSink(std::vector<DenseSample>& out, std::size_t total_substeps, int forced)
      : out_(out) {
    const std::size_t reserved = static_cast<std::size_t>(forced) + 1;
    const std::size_t free_budget = kDenseSampleBudget > reserved ? kDenseSampleBudget - reserved : 0;
    if (free_budget > 0)
      stride_ = std::max<std::size_t>(1, (total_substeps + free_budget - 1) / free_budget);
    else
      stride_ = total_substeps + 1;  // forced samples only
  }

  void push(double t, const Vec& x, const Vec& u, bool force) {
    const bool due = counter_ % stride_ == 0;
    ++counter_;
    if (force || due) out_.push_back({t, x, u});
  }

 private:
  std::vector<DenseSample>& out_;
  std::size_t stride_ = 1;
  std::size_t counter_ = 0;
};

std::size_t total_substeps(const CheckpointSchedule& sched, double h_max) {
  std::size_t total = 0;
  for (int n = 1; n <= sched.count(); ++n)
    total += static_cast<std::size_t>(std::ceil(interval_length(sched, n) / h_max));
  return total;
}

[[noreturn]] void throw_diverged(double t, TrajectoryRecord&& partial, double u_running) {
  partial.u_inf_max = u_running;
  partial.constraint_satisfied = u_running <= 1.0 + kConstraintTol;
  throw Diverged(t, std::make_shared<const TrajectoryRecord>(std::move(partial)));
}

}  // namespace

Diverged::Diverged(double t_at, std::shared_ptr<const TrajectoryRecord> partial_record)
    : Error("simulation diverged at t = " + std::to_string(t_at)),
      t(t_at),
      partial(std::move(partial_record)) {}

CheckpointSchedule ProblemSpec::make_schedule() const {
  return schedule_kind == ScheduleKind::harmonic
             ? harmonic_schedule(t_star, n_checkpoints)
             : geometric_schedule(t_final, ratio, n_checkpoints);
}

double ProblemSpec::effective_h_max(const CheckpointSchedule& schedule) const {
  if (h_max > 0.0) return h_max;
  const double scale = schedule_kind == ScheduleKind::harmonic ? t_star : t_final;
  return std::min(1e-3 * scale, interval_length(schedule, schedule.count()) / 16.0);
}

void ProblemSpec::validate() const {
  if (model.state_dim < 1 || model.input_dim < 1 || !model.drift || !model.input_map)
    throw InvalidProblem("ProblemSpec: incomplete model");
  if (x0.dim() != model.state_dim || xtg.dim() != model.state_dim)
    throw InvalidProblem("ProblemSpec: x0/xtg dimension mismatch with model " + model.name);
  if (!all_finite(x0) || !all_finite(xtg))
    throw InvalidProblem("ProblemSpec: non-finite x0/xtg");
  if (n_checkpoints < 1) throw InvalidProblem("ProblemSpec: n_checkpoints must be >= 1");
  if (schedule_kind == ScheduleKind::harmonic) {
    if (!(t_star > 0.0)) throw InvalidProblem("ProblemSpec: t_star must be positive");
  } else {
    if (!(t_final > 0.0) || !(ratio > 1.0))
      throw InvalidProblem("ProblemSpec: geometric schedule needs t_final > 0 and ratio > 1");
  }
  if (h_max < 0.0) throw InvalidProblem("ProblemSpec: h_max must be nonnegative");
  if (!(epsilon > 0.0)) throw InvalidProblem("ProblemSpec: epsilon must be positive");
}

std::pair<Vec, std::vector<DenseSample>> integrate_segment(const SystemModel& model,
                                                           const Vec& x_start, const Vec& u_const,
                                                           double t0, double t1, double h_max) {
  if (!(t1 > t0)) throw InvalidInterval("integrate_segment: t1 must exceed t0");
  if (!(h_max > 0.0)) throw InvalidInterval("integrate_segment: h_max must be positive");

  const int nsub = static_cast<int>(std::ceil((t1 - t0) / h_max));
  const double h = (t1 - t0) / nsub;
  std::vector<DenseSample> samples;
  samples.reserve(static_cast<std::size_t>(nsub));

  Vec x = x_start;
  double t_prev = t0;
  for (int i = 1; i <= nsub; ++i) {
    const double t_next = i == nsub ? t1 : t0 + i * h;
    x = rk4_step(model, x, u_const, t_next - t_prev);
    if (!all_finite(x))
      throw Diverged(t_next, nullptr);
    samples.push_back({t_next, x, u_const});
    t_prev = t_next;
  }
  return {x, std::move(samples)};
}

TrajectoryRecord run_closed_loop(const ProblemSpec& spec) {
  spec.validate();
  const CheckpointSchedule sched = spec.make_schedule();
  const double h_max = spec.effective_h_max(sched);
  if (h_max >= interval_length(sched, sched.count()))
    throw InvalidProblem("run_closed_loop: h_max must be below the shortest interval");

  const Mat g0 = spec.model.input_map(spec.x0);
  const Mat g0_pinv = pinv(g0);

  std::optional<ErrorBoundSequence> bounds;
  if (spec.model.lipschitz) {
    const double d_s = spec.model.lipschitz->d_f + spec.model.lipschitz->d_g;
    const double c =
        inf_norm(spec.model.drift(spec.x0)) + (d_s + 1.0) * inf_norm(spec.xtg - spec.x0);
    bounds = ErrorBoundSequence{c, d_s, sched};
  }

  TrajectoryRecord rec;
  rec.checkpoints.reserve(static_cast<std::size_t>(sched.count()));
  rec.intra_interval_err_max.reserve(static_cast<std::size_t>(sched.count()));
  SampleSink sink(rec.samples, total_substeps(sched, h_max), sched.count());

  Vec x = spec.x0;
  double u_running = 0.0;
  for (int n = 1; n <= sched.count(); ++n) {
    const double t0 = sched.times[n - 1];
    const double t1 = sched.times[n];
    const double dt = t1 - t0;
    const Vec u = segment_input(g0_pinv, x, spec.xtg, dt);
    if (n == 1) sink.push(0.0, x, u, true);
    u_running = std::max(u_running, inf_norm(u));

    const int nsub = static_cast<int>(std::ceil(dt / h_max));
    const double h = dt / nsub;
    double intra = 0.0;
    double t_prev = t0;
    for (int i = 1; i <= nsub; ++i) {
      const double t_next = i == nsub ? t1 : t0 + i * h;
      x = rk4_step(spec.model, x, u, t_next - t_prev);
      if (!all_finite(x)) throw_diverged(t_next, std::move(rec), u_running);
      intra = std::max(intra, inf_norm(spec.xtg - x));
      sink.push(t_next, x, u, i == nsub);
      t_prev = t_next;
    }

    CheckpointRecord cp;
    cp.n = n;
    cp.t_n = t1;  // bit-exact schedule time
    cp.dt_n = dt;
    cp.x_n = x;
    cp.err_inf = inf_norm(spec.xtg - x);
    if (bounds) cp.vbar_n = error_bound(*bounds, n);
    cp.u_n = u;
    cp.u_inf_max_so_far = u_running;
    rec.checkpoints.push_back(std::move(cp));
    rec.intra_interval_err_max.push_back(intra);
  }

  rec.u_inf_max = u_running;
  rec.constraint_satisfied = u_running <= 1.0 + kConstraintTol;
  return rec;
}

TrajectoryRecord run_driftless(const ProblemSpec& spec) {
  spec.validate();
  const CheckpointSchedule sched = spec.make_schedule();
  const double h_max = spec.effective_h_max(sched);
  const double dt1 = interval_length(sched, 1);
  if (h_max >= dt1) throw InvalidProblem("run_driftless: h_max must be below the first interval");

  const Mat g0 = spec.model.input_map(spec.x0);
  const Mat g0_pinv = pinv(g0);
  const Vec u1 = segment_input(g0_pinv, spec.x0, spec.xtg, dt1);

  SystemModel surrogate;
  surrogate.name = spec.model.name + "_driftless";
  surrogate.state_dim = spec.model.state_dim;
  surrogate.input_dim = spec.model.input_dim;
  surrogate.drift = [n = spec.model.state_dim](const Vec&) { return Vec::zeros(n); };
  surrogate.input_map = [g0](const Vec&) { return g0; };

  TrajectoryRecord rec;
  const auto nsub = static_cast<std::size_t>(std::ceil(dt1 / h_max));
  SampleSink sink(rec.samples, nsub, 1);
  sink.push(0.0, spec.x0, u1, true);

  const double u_norm = inf_norm(u1);
  Vec x = spec.x0;
  double intra = 0.0;
  const int steps = static_cast<int>(nsub);
  const double h = dt1 / steps;
  double t_prev = 0.0;
  for (int i = 1; i <= steps; ++i) {
    const double t_next = i == steps ? dt1 : i * h;
    x = rk4_step(surrogate, x, u1, t_next - t_prev);
    if (!all_finite(x)) throw_diverged(t_next, std::move(rec), u_norm);
    intra = std::max(intra, inf_norm(spec.xtg - x));
    sink.push(t_next, x, u1, i == steps);
    t_prev = t_next;
  }

  CheckpointRecord cp;
  cp.n = 1;
  cp.t_n = dt1;
  cp.dt_n = dt1;
  cp.x_n = x;
  cp.err_inf = inf_norm(spec.xtg - x);
  cp.u_n = u1;
  cp.u_inf_max_so_far = u_norm;
  rec.checkpoints.push_back(std::move(cp));
  rec.intra_interval_err_max.push_back(intra);
  rec.u_inf_max = u_norm;
  rec.constraint_satisfied = u_norm <= 1.0 + kConstraintTol;
  return rec;
}

TrajectoryRecord run_baseline(const ProblemSpec& spec, bool clamped) {
  spec.validate();
  const CheckpointSchedule sched = spec.make_schedule();
  const double h_max = spec.effective_h_max(sched);
  if (h_max >= interval_length(sched, sched.count()))
    throw InvalidProblem("run_baseline: h_max must be below the shortest interval");

  const BaselineController ctrl = baseline_feedback(spec.model, spec.xtg, clamped);

  TrajectoryRecord rec;
  rec.checkpoints.reserve(static_cast<std::size_t>(sched.count()));
  rec.intra_interval_err_max.reserve(static_cast<std::size_t>(sched.count()));
  SampleSink sink(rec.samples, total_substeps(sched, h_max), sched.count());

  Vec x = spec.x0;
  Vec u = ctrl.input_at(x);
  sink.push(0.0, x, u, true);
  double u_running = 0.0;
  for (int n = 1; n <= sched.count(); ++n) {
    const double t0 = sched.times[n - 1];
    const double t1 = sched.times[n];
    const double dt = t1 - t0;
    const int nsub = static_cast<int>(std::ceil(dt / h_max));
    const double h = dt / nsub;
    double intra = 0.0;
    double t_prev = t0;
    for (int i = 1; i <= nsub; ++i) {
      // zero-order hold of the feedback over one substep
      u = ctrl.input_at(x);
      u_running = std::max(u_running, inf_norm(u));
      const double t_next = i == nsub ? t1 : t0 + i * h;
      x = rk4_step(spec.model, x, u, t_next - t_prev);
      if (!all_finite(x)) throw_diverged(t_next, std::move(rec), u_running);
      intra = std::max(intra, inf_norm(spec.xtg - x));
      sink.push(t_next, x, u, i == nsub);
      t_prev = t_next;
    }

    CheckpointRecord cp;
    cp.n = n;
    cp.t_n = t1;
    cp.dt_n = dt;
    cp.x_n = x;
    cp.err_inf = inf_norm(spec.xtg - x);
    cp.u_n = u;
    cp.u_inf_max_so_far = u_running;
    rec.checkpoints.push_back(std::move(cp));
    rec.intra_interval_err_max.push_back(intra);
  }

  rec.u_inf_max = u_running;
  rec.constraint_satisfied = u_running <= 1.0 + kConstraintTol;
  return rec;
}

}  // namespace driftless
