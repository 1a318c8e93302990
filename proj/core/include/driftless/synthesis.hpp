#pragma once

#include <optional>

#include "driftless/linalg.hpp"
#include "driftless/models.hpp"
#include "driftless/schedule.hpp"

namespace driftless {

/// Constants of the constraint certificate together with the driftless
/// approximation data at the initial state.
struct FeasibilityReport {
  double d_s = 0.0;      // d_f + d_g
  double c = 0.0;        // |f(x0)|_inf + (d_s + 1) |xtg - x0|_inf
  double c1 = 0.0;       // 2 c |pinv(g0)|_inf
  double t_lower = 0.0;  // |pinv(g0) (xtg - x0)|_inf, smallest feasible t_star
  std::optional<double> t_upper;  // present iff 0 < c1 < 1
  bool window_nonempty = false;
  Mat g0;
  Mat g0_pinv;
  bool rank_ok = false;
};

/// Evaluate the certificate constants for a problem instance. Requires the
/// model to carry Lipschitz constants (LipschitzUnknown otherwise).
FeasibilityReport compute_constants(const SystemModel& model, const Vec& x0, const Vec& xtg);

/// Unique positive root of exp(t * d_s) = t * d_s / c1 + 1, which exists iff
/// 0 < c1 < 1 (NoRoot otherwise). Bisection in y = t * d_s to 1e-13 absolute.
double solve_t_upper(double c1, double d_s);

/// Per-checkpoint error bound (c / d_s) * (exp(dt_n * d_s) - 1); the d_s -> 0
/// limit c * dt_n is used when both Lipschitz constants vanish.
struct ErrorBoundSequence {
  double c = 0.0;
  double d_s = 0.0;
  CheckpointSchedule schedule;
};
double error_bound(const ErrorBoundSequence& seq, int n);

/// Constant minimum-energy input (1/dt) * g0_pinv * (xtg - x_prev) steering
/// the driftless approximation to xtg over one interval of length dt.
Vec segment_input(const Mat& g0_pinv, const Vec& x_prev, const Vec& xtg, double dt);

/// (I - g0 * g0_pinv) * (xtg - x0): the irreducible driftless error when g0
/// lacks full row rank; zero under full row rank.
Vec rank_deficiency_residual(const Mat& g0, const Mat& g0_pinv, const Vec& x0, const Vec& xtg);

enum class TstarVerdict {
  certified,   // t_lower <= t_star <= t_upper: constraint guaranteed
  lower_only,  // first input feasible, no certified upper bound applies
  infeasible,  // t_star < t_lower: the first input violates the constraint
};

TstarVerdict check_t_star(const FeasibilityReport& report, double t_star);

const char* to_string(TstarVerdict v);

}  // namespace driftless
