#include "driftless/models.hpp"

#include <algorithm>
#include <cmath>

namespace driftless {

SystemModel admire_model() {
  const Mat a{{-0.9967, 0.0, 0.6176},
              {0.0, -0.5057, 0.0},
              {-0.0939, 0.0, -0.2127}};
  const Mat b{{0.0, -4.2423, 4.2423, 1.4871},
              {1.6532, -1.2735, -1.2735, 0.0024},
              {0.0, -0.2805, 0.2805, -0.8823}};

  SystemModel m;
  m.name = "admire";
  m.state_dim = 3;
  m.input_dim = 4;
  m.drift = [a](const Vec& x) {
    Vec f = a * x;
    const double p = x[0], q = x[1];
    f[0] += 0.5 * std::sin(p) * std::cos(p) * std::cos(p);
    f[1] += -0.5 * std::sin(2.0 * q);
    f[2] += 0.5;
    return f;
  };
  m.input_map = [b](const Vec&) { return b; };
  // |A|_inf + 1 covers the wind term; input map is constant.
  m.lipschitz = LipschitzConstants{2.6143, 0.0};
  return m;
}

SystemModel vdp_model(double mu) {
  SystemModel m;
  m.name = "vdp";
  m.state_dim = 2;
  m.input_dim = 1;
  m.drift = [mu](const Vec& x) {
    return Vec{x[1], mu * (1.0 - x[0] * x[0]) * x[1] - x[0]};
  };
  m.input_map = [](const Vec&) { return Mat{{0.0}, {1.0}}; };
  // Cubic term: not globally Lipschitz, no constants attached.
  return m;
}

SystemModel wing_rock_model() {
  constexpr double c1 = 5.0, c2 = -26.67, c3 = 0.765, c4 = -2.92, c5 = -2.5, c6 = 0.75;
  SystemModel m;
  m.name = "wing_rock";
  m.state_dim = 2;
  m.input_dim = 1;
  m.drift = [=](const Vec& x) {
    const double phi = x[0], p = x[1];
    return Vec{p, c1 + c2 * phi + c3 * p + c4 * std::abs(phi) * p + c5 * std::abs(p) * p};
  };
  m.input_map = [](const Vec&) { return Mat{{0.0}, {c6}}; };
  return m;
}

Mat two_link_inertia(double m1, double m2, double l1, double l2, double theta2) {
  const double c = std::cos(theta2);
  const double m11 = m1 * l1 * l1 + m2 * (l1 * l1 + l2 * l2 + 2.0 * l1 * l2 * c);
  const double m12 = m2 * (l2 * l2 + l1 * l2 * c);
  return Mat{{m11, m12}, {m12, m2 * l2 * l2}};
}

SystemModel two_link_model(double m1, double m2, double l1, double l2, double g_acc) {
  if (!(m1 > 0.0) || !(m2 > 0.0) || !(l1 > 0.0) || !(l2 > 0.0))
    throw InvalidProblem("two_link_model: masses and lengths must be positive");

  auto inertia_inverse = [=](double theta2) {
    const Mat m = two_link_inertia(m1, m2, l1, l2, theta2);
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double scale = inf_norm(m);
    if (std::abs(det) <= 1e-15 * scale * scale)
      throw SingularInertia("two_link: singular inertia matrix at theta2 = " +
                            std::to_string(theta2));
    return Mat{{m(1, 1) / det, -m(0, 1) / det}, {-m(1, 0) / det, m(0, 0) / det}};
  };

  SystemModel m;
  m.name = "two_link";
  m.state_dim = 4;
  m.input_dim = 2;
  m.drift = [=](const Vec& x) {
    const double th1 = x[0], th1d = x[1], th2 = x[2], th2d = x[3];
    const Mat minv = inertia_inverse(th2);
    const double s2 = std::sin(th2);
    const Vec coriolis{-m2 * l1 * l2 * s2 * th2d * (2.0 * th1d + th2d),
                       m2 * l1 * l2 * s2 * th1d * th1d};
    const Vec gravity{(m1 + m2) * g_acc * l1 * std::sin(th1) + m2 * g_acc * l2 * std::sin(th1 + th2),
                      m2 * g_acc * l2 * std::sin(th1 + th2)};
    const Vec acc = minv * (-1.0 * (coriolis + gravity));
    return Vec{th1d, acc[0], th2d, acc[1]};
  };
  m.input_map = [=](const Vec& x) {
    const Mat minv = inertia_inverse(x[2]);
    Mat g(4, 2);
    g(1, 0) = minv(0, 0);
    g(1, 1) = minv(0, 1);
    g(3, 0) = minv(1, 0);
    g(3, 1) = minv(1, 1);
    return g;
  };
  return m;
}

Mat numerical_jacobian(const SystemModel& model, const Vec& x, double h) {
  const int n = model.state_dim;
  if (h <= 0.0) h = 1e-6 * (1.0 + inf_norm(x));
  Mat jac(n, n);
  for (int j = 0; j < n; ++j) {
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Vec fp = model.drift(xp);
    const Vec fm = model.drift(xm);
    for (int i = 0; i < n; ++i) jac(i, j) = (fp[i] - fm[i]) / (2.0 * h);
  }
  return jac;
}

Vec BaselineController::input_at(const Vec& x) const {
  Vec u = u_ss - gain * (x - x_ref);
  if (clamped)
    for (int i = 0; i < u.dim(); ++i) u[i] = std::clamp(u[i], -1.0, 1.0);
  return u;
}

namespace {

// Solve a_cl^T p + p a_cl = rhs by vectorizing into an n^2 x n^2 system.
Mat lyapunov_solve(const Mat& a_cl, const Mat& rhs) {
  const int n = a_cl.rows();
  Mat sys(n * n, n * n);
  Vec b(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int row = i * n + j;
      for (int k = 0; k < n; ++k) {
        sys(row, k * n + j) += a_cl(k, i);
        sys(row, i * n + k) += a_cl(k, j);
      }
      b[row] = rhs(i, j);
    }
  }
  const Vec p_vec = linear_solve(sys, b);
  Mat p(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p(i, j) = p_vec[i * n + j];
  // symmetrize against solver roundoff
  return 0.5 * (p + transpose(p));
}

bool is_positive_definite(const Mat& p) {
  const int n = p.rows();
  Mat chol(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double acc = p(i, j);
      for (int k = 0; k < j; ++k) acc -= chol(i, k) * chol(j, k);
      if (i == j) {
        if (acc <= 0.0) return false;
        chol(i, i) = std::sqrt(acc);
      } else {
        chol(i, j) = acc / chol(j, j);
      }
    }
  }
  return true;
}

}  // namespace

BaselineController baseline_feedback(const SystemModel& model, const Vec& xtg, bool clamped) {
  if (xtg.dim() != model.state_dim)
    throw InvalidProblem("baseline_feedback: target dimension mismatch");

  const int n = model.state_dim;
  const int m = model.input_dim;
  const Mat a_lin = numerical_jacobian(model, xtg);
  const Mat b_lin = model.input_map(xtg);

  // Newton-Kleinman with Q = I, R = I, seeded with zero gain.
  const Mat q = Mat::identity(n);
  Mat gain(m, n);
  Mat p_prev(n, n);
  bool converged = false;
  for (int iter = 0; iter < 100; ++iter) {
    const Mat a_cl = a_lin - b_lin * gain;
    Mat p;
    try {
      p = lyapunov_solve(a_cl, -1.0 * (q + transpose(gain) * gain));
    } catch (const InvalidMatrix&) {
      throw BaselineSynthesisFailed("baseline_feedback: singular Lyapunov system for " +
                                    model.name);
    }
    if (!all_finite(p)) break;
    gain = transpose(b_lin) * p;
    if (iter > 0 && inf_norm(p - p_prev) < 1e-10) {
      converged = is_positive_definite(p);
      break;
    }
    p_prev = p;
  }
  if (!converged)
    throw BaselineSynthesisFailed("baseline_feedback: Riccati iteration failed for " + model.name);

  BaselineController ctrl;
  ctrl.gain = gain;
  // Feedforward from the linearized model xdot = a_lin x + b_lin u, so that
  // xtg is an equilibrium of that closed loop.
  ctrl.u_ss = -1.0 * (pinv(b_lin) * (a_lin * xtg));
  ctrl.x_ref = xtg;
  ctrl.clamped = clamped;
  return ctrl;
}

}  // namespace driftless
