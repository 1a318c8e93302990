#include <cmath>

#include <doctest.h>

#include "driftless/models.hpp"
#include "driftless/synthesis.hpp"
#include "oracles.hpp"

using namespace driftless;

namespace {

SystemModel zero_drift_model() {
  SystemModel m;
  m.name = "integrator";
  m.state_dim = 2;
  m.input_dim = 2;
  m.drift = [](const Vec&) { return Vec{0.0, 0.0}; };
  m.input_map = [](const Vec&) { return Mat::identity(2); };
  m.lipschitz = LipschitzConstants{0.0, 0.0};
  return m;
}

}  // namespace

TEST_CASE("compute_constants on the admire benchmark") {
  const SystemModel model = admire_model();
  const FeasibilityReport r =
      compute_constants(model, Vec{4.86, 1.23, 3.07}, Vec{0.0, 0.0, 0.0});
  CHECK(r.d_s == doctest::Approx(2.6143).epsilon(1e-15));
  CHECK(r.rank_ok);
  CHECK(r.c == doctest::Approx(inf_norm(model.drift(Vec{4.86, 1.23, 3.07})) +
                               3.6143 * 4.86).epsilon(1e-14));
  CHECK(r.c1 > 1.0);  // large excursion: no certified upper bound
  CHECK(!r.t_upper.has_value());
  CHECK(!r.window_nonempty);
}

TEST_CASE("compute_constants degenerate problem") {
  const SystemModel m = zero_drift_model();
  const FeasibilityReport r = compute_constants(m, Vec{0.3, -0.4}, Vec{0.3, -0.4});
  CHECK(r.c == 0.0);
  CHECK(r.c1 == 0.0);
  CHECK(r.t_lower == 0.0);
  CHECK(!r.t_upper.has_value());
}

TEST_CASE("compute_constants near the origin matches hand evaluation") {
  const SystemModel model = admire_model();
  const Vec x0{0.01, 0.0, 0.0};
  const Vec xtg{0.0, 0.0, 0.0};
  const FeasibilityReport r = compute_constants(model, x0, xtg);

  const double c_expected = inf_norm(model.drift(x0)) + 3.6143 * 0.01;
  CHECK(r.c == doctest::Approx(c_expected).epsilon(1e-13));

  const Mat b_pinv = oracles::pinv_full_row_rank(model.input_map(x0));
  CHECK(r.c1 == doctest::Approx(2.0 * c_expected * inf_norm(b_pinv)).epsilon(1e-12));
  CHECK(r.t_lower == doctest::Approx(inf_norm(b_pinv * (xtg - x0))).epsilon(1e-12));
  if (r.c1 < 1.0) {
    REQUIRE(r.t_upper.has_value());
    CHECK(*r.t_upper == doctest::Approx(oracles::tbar_oracle(r.c1, r.d_s)).epsilon(1e-9));
  }
}

TEST_CASE("compute_constants error paths") {
  CHECK_THROWS_AS(compute_constants(vdp_model(0.2), Vec{1.0, 1.0}, Vec{0.0, 0.0}),
                  LipschitzUnknown);
  CHECK_THROWS_AS(compute_constants(admire_model(), Vec{1.0, 1.0}, Vec{0.0, 0.0, 0.0}),
                  InvalidProblem);
}

TEST_CASE("solve_t_upper frozen and oracle values") {
  CHECK(solve_t_upper(0.5, 1.0) == doctest::Approx(1.2564312086261702).epsilon(1e-10));
  CHECK(solve_t_upper(0.9, 2.0) == doctest::Approx(oracles::tbar_oracle(0.9, 2.0)).epsilon(1e-9));

  CHECK_THROWS_AS(solve_t_upper(1.0, 1.0), NoRoot);
  CHECK_THROWS_AS(solve_t_upper(0.0, 1.0), NoRoot);
  CHECK_THROWS_AS(solve_t_upper(-0.2, 1.0), NoRoot);
  CHECK_THROWS_AS(solve_t_upper(1.7, 1.0), NoRoot);
  CHECK_THROWS_AS(solve_t_upper(0.5, 0.0), InvalidProblem);
}

TEST_CASE("solve_t_upper satisfies its defining equation") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 200; ++trial) {
    const double c1 = oracles::urand(rng, 1e-3, 1.0 - 1e-3);
    const double d_s = oracles::urand(rng, 1e-2, 10.0);
    const double t_bar = solve_t_upper(c1, d_s);
    const double y = t_bar * d_s;
    const double residual = std::expm1(y) - y / c1;
    CHECK(std::abs(residual) < 1e-12 * (1.0 + y / c1));

    // perturbing the root by 1% flips the sign of the defining function
    const auto h = [&](double yy) { return c1 * std::expm1(yy) - yy; };
    CHECK(h(0.99 * y) < 0.0);
    CHECK(h(1.01 * y) > 0.0);
  }
}

TEST_CASE("error_bound analytic values") {
  ErrorBoundSequence seq{1.0, 1.0, harmonic_schedule(1.0, 10)};
  CHECK(error_bound(seq, 1) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
  CHECK(error_bound(seq, 2) <= 0.5 * error_bound(seq, 1));

  ErrorBoundSequence seq2{2.0, 0.5, harmonic_schedule(3.0, 10)};
  CHECK(error_bound(seq2, 3) == doctest::Approx(4.0 * (std::exp(0.5) - 1.0)).epsilon(1e-14));

  // both Lipschitz constants zero: the bound degenerates to c * dt_n
  ErrorBoundSequence flat{0.7, 0.0, harmonic_schedule(2.0, 10)};
  CHECK(error_bound(flat, 4) == doctest::Approx(0.7 * 0.5).epsilon(1e-15));
}

TEST_CASE("error_bound recursion over random parameters") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    ErrorBoundSequence seq{oracles::urand(rng, 1e-3, 10.0), oracles::urand(rng, 1e-3, 10.0),
                           harmonic_schedule(oracles::urand(rng, 0.1, 20.0), 1000)};
    const double v1 = error_bound(seq, 1);
    double prev = v1;
    for (int n = 1; n < 1000; ++n) {
      const double next = error_bound(seq, n + 1);
      CHECK(next <= (static_cast<double>(n) / (n + 1)) * prev * (1.0 + 1e-12));
      CHECK(next <= v1 / (n + 1) * (1.0 + 1e-12));
      prev = next;
    }
  }
}

TEST_CASE("segment_input") {
  const Mat eye = Mat::identity(2);
  const Vec u = segment_input(eye, Vec{0.0, 1.0}, Vec{1.0, 0.0}, 2.0);
  CHECK(u[0] == doctest::Approx(0.5));
  CHECK(u[1] == doctest::Approx(-0.5));

  const Vec at_target = segment_input(eye, Vec{0.4, -0.2}, Vec{0.4, -0.2}, 1.0);
  CHECK(inf_norm(at_target) == 0.0);

  const SystemModel model = admire_model();
  const Mat b = model.input_map(Vec{0.0, 0.0, 0.0});
  const Vec u_admire = segment_input(pinv(b), Vec{0.0, 0.0, 0.0}, Vec{1.0, 0.0, 0.0}, 10.0);
  const Vec expected = 0.1 * (oracles::pinv_full_row_rank(b) * Vec{1.0, 0.0, 0.0});
  CHECK(inf_norm(u_admire - expected) < 1e-10);

  CHECK_THROWS_AS(segment_input(eye, Vec{0.0, 0.0}, Vec{1.0, 1.0}, 0.0), InvalidInterval);
  CHECK_THROWS_AS(segment_input(eye, Vec{0.0, 0.0}, Vec{1.0, 1.0}, -1.0), InvalidInterval);
}

TEST_CASE("first input saturates exactly when dt equals t_lower") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const Mat g0 = oracles::rand_mat(rng, 3, 4, -2.0, 2.0);
    const Mat g0_pinv = pinv(g0);
    const Vec x0 = oracles::rand_vec(rng, 3, -5.0, 5.0);
    const Vec xtg = oracles::rand_vec(rng, 3, -5.0, 5.0);
    const double t_lower = inf_norm(g0_pinv * (xtg - x0));
    if (t_lower < 1e-6) continue;
    CHECK(inf_norm(segment_input(g0_pinv, x0, xtg, t_lower)) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("rank_deficiency_residual") {
  const Mat col{{0.0}, {1.0}};
  const Vec r = rank_deficiency_residual(col, pinv(col), Vec{0.0, 0.0}, Vec{1.0, 1.0});
  CHECK(r[0] == doctest::Approx(1.0));
  CHECK(r[1] == doctest::Approx(0.0));

  const SystemModel model = admire_model();
  const Mat b = model.input_map(Vec{0.0, 0.0, 0.0});
  const Vec full = rank_deficiency_residual(b, pinv(b), Vec{1.0, -2.0, 0.5}, Vec{0.0, 1.0, 0.0});
  CHECK(inf_norm(full) < 1e-10);

  const Mat wing{{0.0}, {0.75}};
  const double quarter_pi = 0.78539816339744828;
  const Vec wr =
      rank_deficiency_residual(wing, pinv(wing), Vec{0.0, 0.0}, Vec{quarter_pi, 0.1});
  CHECK(wr[0] == doctest::Approx(quarter_pi).epsilon(1e-14));
  CHECK(std::abs(wr[1]) < 1e-14);
}

TEST_CASE("rank-deficiency projector is idempotent") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 40; ++trial) {
    const int rows = 2 + static_cast<int>(rng() % 3);
    const int cols = 1 + static_cast<int>(rng() % 2);  // tall: usually rank deficient
    const Mat g0 = oracles::rand_mat(rng, rows, cols, -2.0, 2.0);
    const Mat g0p = pinv(g0);
    const Vec x0 = oracles::rand_vec(rng, rows, -3.0, 3.0);
    const Vec xtg = oracles::rand_vec(rng, rows, -3.0, 3.0);
    const Vec once = rank_deficiency_residual(g0, g0p, x0, xtg);
    // feed the residual back: x0' chosen so xtg - x0' equals the residual
    const Vec twice = rank_deficiency_residual(g0, g0p, xtg - once, xtg);
    CHECK(inf_norm(twice - once) < 1e-10 * (1.0 + inf_norm(once)));
  }
}

TEST_CASE("check_t_star verdicts") {
  FeasibilityReport r;
  r.t_lower = 2.0;

  SUBCASE("below the lower bound") {
    CHECK(check_t_star(r, 1.5) == TstarVerdict::infeasible);
  }
  SUBCASE("no certified upper bound") {
    CHECK(check_t_star(r, 2.0) == TstarVerdict::lower_only);
    CHECK(check_t_star(r, 100.0) == TstarVerdict::lower_only);
  }
  SUBCASE("inside and beyond the window") {
    r.t_upper = 5.0;
    r.window_nonempty = true;
    CHECK(check_t_star(r, 2.0) == TstarVerdict::certified);
    CHECK(check_t_star(r, 5.0) == TstarVerdict::certified);
    CHECK(check_t_star(r, 5.1) == TstarVerdict::lower_only);
  }
}

TEST_CASE("a small-excursion instance around an equilibrium is certified") {
  const SystemModel model = admire_model();
  // drift zero of the admire dynamics, found offline by Newton iteration
  const Vec x_eq{1.1934552730807213, 0.0, 1.8238577802431608};
  REQUIRE(inf_norm(model.drift(x_eq)) < 1e-12);

  const Vec x0 = x_eq + Vec{0.04, -0.03, 0.05};
  const FeasibilityReport r = compute_constants(model, x0, x_eq);
  CHECK(r.c1 < 1.0);
  REQUIRE(r.t_upper.has_value());
  CHECK(r.window_nonempty);
  CHECK(check_t_star(r, *r.t_upper) == TstarVerdict::certified);
  CHECK(check_t_star(r, r.t_lower) == TstarVerdict::certified);
}
