#include <cmath>
#include <limits>

#include <doctest.h>

#include "driftless/linalg.hpp"
#include "oracles.hpp"

using namespace driftless;

TEST_CASE("inf_norm of vectors") {
  CHECK(inf_norm(Vec{0.0, 0.0, 0.0}) == 0.0);
  CHECK(inf_norm(Vec{4.86, 1.23, 3.07}) == 4.86);
  CHECK(inf_norm(Vec{-2.0, 1.5}) == 2.0);
}

TEST_CASE("inf_norm of vectors is absolutely homogeneous") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec v = oracles::rand_vec(rng, 1 + static_cast<int>(rng() % 5), -10.0, 10.0);
    const double alpha = oracles::urand(rng, -5.0, 5.0);
    CHECK(inf_norm(alpha * v) == doctest::Approx(std::abs(alpha) * inf_norm(v)).epsilon(1e-15));
  }
}

TEST_CASE("inf_norm of matrices is the max absolute row sum") {
  CHECK(inf_norm(Mat::identity(3)) == 1.0);
  CHECK(inf_norm(Mat{{1.0, -2.0}, {0.0, 0.0}}) == 3.0);

  const Mat admire_a{{-0.9967, 0.0, 0.6176}, {0.0, -0.5057, 0.0}, {-0.0939, 0.0, -0.2127}};
  CHECK(inf_norm(admire_a) == doctest::Approx(1.6143).epsilon(1e-14));
}

namespace {

const Mat kAdmireB{{0.0, -4.2423, 4.2423, 1.4871},
                   {1.6532, -1.2735, -1.2735, 0.0024},
                   {0.0, -0.2805, 0.2805, -0.8823}};

}  // namespace

TEST_CASE("pinv on simple shapes") {
  const Mat eye = pinv(Mat::identity(2));
  CHECK(inf_norm(eye - Mat::identity(2)) < 1e-14);

  const Mat col{{0.0}, {1.0}};
  const Mat left = pinv(col);
  REQUIRE(left.rows() == 1);
  REQUIRE(left.cols() == 2);
  CHECK(left(0, 0) == doctest::Approx(0.0));
  CHECK(left(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("pinv of a wide full-row-rank matrix is a right inverse") {
  const Mat b_pinv = pinv(kAdmireB);
  CHECK(inf_norm(kAdmireB * b_pinv - Mat::identity(3)) < 1e-10);
  // agrees with the Gram-matrix route
  CHECK(inf_norm(b_pinv - oracles::pinv_full_row_rank(kAdmireB)) < 1e-9);
}

TEST_CASE("pinv rejects non-finite input") {
  Mat bad(2, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(pinv(bad), InvalidMatrix);
  bad(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(pinv(bad), InvalidMatrix);
}

TEST_CASE("numerical_rank") {
  CHECK(numerical_rank(kAdmireB) == 3);
  CHECK(numerical_rank(Mat{{0.0}, {1.0}}) == 1);
  CHECK(numerical_rank(Mat::zeros(2, 3)) == 0);
  CHECK(numerical_rank(Mat{{1.0, 2.0}, {2.0, 4.0}}) == 1);
}

TEST_CASE("Penrose identities hold for random small matrices") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 6);
    const int cols = 1 + static_cast<int>(rng() % 6);
    const Mat m = oracles::rand_mat(rng, rows, cols, -3.0, 3.0);
    const Mat p = pinv(m);

    const double scale_m = 1.0 + inf_norm(m);
    const double scale_p = 1.0 + inf_norm(p);
    CHECK(inf_norm(m * p * m - m) < 1e-9 * scale_m);
    CHECK(inf_norm(p * m * p - p) < 1e-9 * scale_p);
    const Mat mp = m * p;
    const Mat pm = p * m;
    CHECK(inf_norm(mp - transpose(mp)) < 1e-9 * (1.0 + inf_norm(mp)));
    CHECK(inf_norm(pm - transpose(pm)) < 1e-9 * (1.0 + inf_norm(pm)));
  }
}

TEST_CASE("pinv matches the Gram route on random full-row-rank matrices") {
  std::mt19937_64 rng(77);
  int tested = 0;
  while (tested < 60) {
    const int rows = 1 + static_cast<int>(rng() % 4);
    const int cols = rows + static_cast<int>(rng() % 3);
    const Mat m = oracles::rand_mat(rng, rows, cols, -2.0, 2.0);
    const Svd dec = svd(m);
    if (dec.sigma.back() < 1e-3 * dec.sigma.front()) continue;  // keep well conditioned
    CHECK(inf_norm(pinv(m) - oracles::pinv_full_row_rank(m)) < 1e-9);
    ++tested;
  }
}

TEST_CASE("svd reconstructs and orders singular values") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 5);
    const int cols = 1 + static_cast<int>(rng() % 5);
    const Mat m = oracles::rand_mat(rng, rows, cols, -4.0, 4.0);
    const Svd dec = svd(m);

    for (std::size_t k = 1; k < dec.sigma.size(); ++k) CHECK(dec.sigma[k - 1] >= dec.sigma[k]);

    Mat recon(rows, cols);
    for (std::size_t k = 0; k < dec.sigma.size(); ++k)
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
          recon(i, j) += dec.sigma[k] * dec.u(i, static_cast<int>(k)) * dec.v(j, static_cast<int>(k));
    CHECK(inf_norm(recon - m) < 1e-10 * (1.0 + inf_norm(m)));
  }
}

TEST_CASE("linear_solve on random well-conditioned systems") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    Mat a = oracles::rand_mat(rng, n, n, -2.0, 2.0);
    for (int i = 0; i < n; ++i) a(i, i) += 4.0;  // diagonally dominant
    const Vec x_true = oracles::rand_vec(rng, n, -3.0, 3.0);
    const Vec x = linear_solve(a, a * x_true);
    CHECK(inf_norm(x - x_true) < 1e-10);
  }
  CHECK_THROWS_AS(linear_solve(Mat::zeros(2, 2), Vec{1.0, 1.0}), InvalidMatrix);
}
