#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "driftless/errors.hpp"

namespace driftless {

/// Dense real vector. Small (state/input sized), value semantics.
class Vec {
 public:
  Vec() = default;
  explicit Vec(int dim) : entries_(static_cast<std::size_t>(require_dim(dim)), 0.0) {}
  Vec(std::initializer_list<double> init) : entries_(init) {}

  static Vec zeros(int dim) { return Vec(dim); }

  int dim() const { return static_cast<int>(entries_.size()); }
  double& operator[](int i) { return entries_[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }

  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  static int require_dim(int dim) {
    if (dim < 1) throw InvalidMatrix("vector dimension must be >= 1");
    return dim;
  }
  std::vector<double> entries_;
};

/// Dense real matrix, row-major. Immutable-by-convention value type.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols)
      : rows_(require_dim(rows)), cols_(require_dim(cols)),
        entries_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0) {}
  Mat(std::initializer_list<std::initializer_list<double>> init);

  static Mat zeros(int rows, int cols) { return Mat(rows, cols); }
  static Mat identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return entries_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return entries_[static_cast<std::size_t>(i) * cols_ + j]; }

 private:
  static int require_dim(int dim) {
    if (dim < 1) throw InvalidMatrix("matrix dimensions must be >= 1");
    return dim;
  }
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> entries_;
};

// Elementwise arithmetic. Dimension mismatches throw InvalidMatrix.
Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(double s, const Vec& v);
Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(double s, const Mat& m);
Mat operator*(const Mat& a, const Mat& b);
Vec operator*(const Mat& m, const Vec& v);
Mat transpose(const Mat& m);

bool all_finite(const Vec& v);
bool all_finite(const Mat& m);

/// max_i |v_i|
double inf_norm(const Vec& v);

/// Induced infinity norm: max absolute row sum.
double inf_norm(const Mat& m);

/// Thin singular value decomposition m = u * diag(sigma) * transpose(v),
/// sigma sorted descending. Computed with one-sided Jacobi rotations on the
/// smaller Gram dimension; adequate for the tiny matrices used here.
struct Svd {
  Mat u;
  std::vector<double> sigma;
  Mat v;
};
Svd svd(const Mat& m);

/// Moore-Penrose pseudoinverse. tol = 0 selects the relative threshold
/// max(rows, cols) * sigma_max * 1e-12; singular values at or below the
/// threshold are treated as zero. Throws InvalidMatrix on non-finite input.
Mat pinv(const Mat& m, double tol = 0.0);

/// Number of singular values strictly above the threshold (same default rule
/// as pinv).
int numerical_rank(const Mat& m, double tol = 0.0);

/// Solve a * x = b by Gaussian elimination with partial pivoting (square a).
Vec linear_solve(const Mat& a, const Vec& b);

}  // namespace driftless
