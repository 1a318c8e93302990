#include "driftless/synthesis.hpp"

#include <cmath>
#include <limits>

namespace driftless {

FeasibilityReport compute_constants(const SystemModel& model, const Vec& x0, const Vec& xtg) {
  if (x0.dim() != model.state_dim || xtg.dim() != model.state_dim)
    throw InvalidProblem("compute_constants: state dimension mismatch for " + model.name);
  if (!model.lipschitz)
    throw LipschitzUnknown("compute_constants: " + model.name + " carries no Lipschitz constants");

  FeasibilityReport r;
  r.d_s = model.lipschitz->d_f + model.lipschitz->d_g;
  r.g0 = model.input_map(x0);
  r.g0_pinv = pinv(r.g0);
  r.rank_ok = numerical_rank(r.g0) == model.state_dim;
  r.c = inf_norm(model.drift(x0)) + (r.d_s + 1.0) * inf_norm(xtg - x0);
  r.c1 = 2.0 * r.c * inf_norm(r.g0_pinv);
  r.t_lower = inf_norm(r.g0_pinv * (xtg - x0));
  if (r.c1 > 0.0 && r.c1 < 1.0) {
    // d_s = 0 degenerates the defining equation; its root moves to infinity.
    r.t_upper = r.d_s > 0.0 ? solve_t_upper(r.c1, r.d_s)
                            : std::numeric_limits<double>::infinity();
  }
  r.window_nonempty = r.t_upper.has_value() && r.t_lower <= *r.t_upper;
  return r;
}

double solve_t_upper(double c1, double d_s) {
  if (!(c1 > 0.0) || !(c1 < 1.0))
    throw NoRoot("solve_t_upper: a positive root exists only for c1 in (0, 1)");
  if (!(d_s > 0.0)) throw InvalidProblem("solve_t_upper: d_s must be positive");

  // Same sign as exp(y) - y/c1 - 1 but safe against overflow for small c1.
  const auto h = [c1](double y) { return c1 * std::expm1(y) - y; };

  double lo = 1e-9;
  while (h(lo) >= 0.0 && lo > 1e-300) lo *= 0.25;  // c1 extremely close to 1
  double hi = 1.0;
  while (h(hi) <= 0.0) hi *= 2.0;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) <= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi) / d_s;
}

double error_bound(const ErrorBoundSequence& seq, int n) {
  const double dt = interval_length(seq.schedule, n);
  if (seq.d_s == 0.0) return seq.c * dt;
  return (seq.c / seq.d_s) * std::expm1(dt * seq.d_s);
}

Vec segment_input(const Mat& g0_pinv, const Vec& x_prev, const Vec& xtg, double dt) {
  if (!(dt > 0.0)) throw InvalidInterval("segment_input: interval length must be positive");
  return (1.0 / dt) * (g0_pinv * (xtg - x_prev));
}

Vec rank_deficiency_residual(const Mat& g0, const Mat& g0_pinv, const Vec& x0, const Vec& xtg) {
  const Vec diff = xtg - x0;
  return diff - g0 * (g0_pinv * diff);
}

TstarVerdict check_t_star(const FeasibilityReport& report, double t_star) {
  if (t_star < report.t_lower) return TstarVerdict::infeasible;
  if (report.t_upper && t_star <= *report.t_upper) return TstarVerdict::certified;
  return TstarVerdict::lower_only;
}

const char* to_string(TstarVerdict v) {
  switch (v) {
    case TstarVerdict::certified: return "certified";
    case TstarVerdict::lower_only: return "lower_only";
    case TstarVerdict::infeasible: return "infeasible";
  }
  return "unknown";
}

}  // namespace driftless
