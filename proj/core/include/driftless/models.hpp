#pragma once

#include <functional>
#include <optional>
#include <string>

#include "driftless/linalg.hpp"

namespace driftless {

/// Lipschitz constants of the drift and input map in the infinity norm.
struct LipschitzConstants {
  double d_f = 0.0;
  double d_g = 0.0;
};

/// Control-affine dynamics xdot = drift(x) + input_map(x) * u. Models are
/// immutable evaluators; concurrent evaluation is fine.
struct SystemModel {
  std::string name;
  int state_dim = 0;
  int input_dim = 0;
  std::function<Vec(const Vec&)> drift;
  std::function<Mat(const Vec&)> input_map;
  std::optional<LipschitzConstants> lipschitz;
};

/// Fighter-jet roll/pitch/yaw rate model with sinusoidal wind effects.
/// N = 3, m = 4, constant input matrix, known Lipschitz constants.
SystemModel admire_model();

/// Forced van der Pol oscillator, nonlinearity strength mu. N = 2, m = 1.
SystemModel vdp_model(double mu);

/// Wing rock roll dynamics of a delta-winged aircraft. N = 2, m = 1.
SystemModel wing_rock_model();

/// Two-link manipulator with joint torques as inputs, state
/// [theta1, theta1_dot, theta2, theta2_dot]. N = 4, m = 2.
SystemModel two_link_model(double m1, double m2, double l1, double l2, double g_acc = 9.81);

/// Inertia matrix of the two-link manipulator at joint angle theta2.
Mat two_link_inertia(double m1, double m2, double l1, double l2, double theta2);

/// Central-difference Jacobian of the drift at x. h = 0 selects the default
/// step 1e-6 * (1 + |x|_inf).
Mat numerical_jacobian(const SystemModel& model, const Vec& x, double h = 0.0);

/// Linear state feedback u(x) = u_ss - gain * (x - x_ref), optionally with
/// each component clamped to [-1, 1].
struct BaselineController {
  Mat gain;
  Vec u_ss;
  Vec x_ref;
  bool clamped = false;

  Vec input_at(const Vec& x) const;
};

/// LQR gain (Q = I, R = I) for the Jacobian linearization at xtg, solved by
/// Newton-Kleinman iteration. The feedforward makes xtg an equilibrium of the
/// linearized closed loop. Throws BaselineSynthesisFailed when the iteration
/// does not converge to a stabilizing solution.
BaselineController baseline_feedback(const SystemModel& model, const Vec& xtg, bool clamped);

}  // namespace driftless
