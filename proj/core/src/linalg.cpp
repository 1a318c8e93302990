#include "driftless/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace driftless {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw InvalidMatrix(msg);
}

}  // namespace

Mat::Mat(std::initializer_list<std::initializer_list<double>> init) {
  rows_ = require_dim(static_cast<int>(init.size()));
  cols_ = require_dim(static_cast<int>(init.begin()->size()));
  entries_.reserve(static_cast<std::size_t>(rows_) * cols_);
  for (const auto& row : init) {
    require(static_cast<int>(row.size()) == cols_, "ragged initializer list");
    entries_.insert(entries_.end(), row.begin(), row.end());
  }
}

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vec operator+(const Vec& a, const Vec& b) {
  require(a.dim() == b.dim(), "vector dimension mismatch");
  Vec out(a.dim());
  for (int i = 0; i < a.dim(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vec operator-(const Vec& a, const Vec& b) {
  require(a.dim() == b.dim(), "vector dimension mismatch");
  Vec out(a.dim());
  for (int i = 0; i < a.dim(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vec operator*(double s, const Vec& v) {
  Vec out(v.dim());
  for (int i = 0; i < v.dim(); ++i) out[i] = s * v[i];
  return out;
}

Mat operator+(const Mat& a, const Mat& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix dimension mismatch");
  Mat out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
  return out;
}

Mat operator-(const Mat& a, const Mat& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix dimension mismatch");
  Mat out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
  return out;
}

Mat operator*(double s, const Mat& m) {
  Mat out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = s * m(i, j);
  return out;
}

Mat operator*(const Mat& a, const Mat& b) {
  require(a.cols() == b.rows(), "matrix product dimension mismatch");
  Mat out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (int j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Vec operator*(const Mat& m, const Vec& v) {
  require(m.cols() == v.dim(), "matrix-vector dimension mismatch");
  Vec out(m.rows());
  for (int i = 0; i < m.rows(); ++i) {
    double acc = 0.0;
    for (int j = 0; j < m.cols(); ++j) acc += m(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

Mat transpose(const Mat& m) {
  Mat out(m.cols(), m.rows());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
  return out;
}

bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

bool all_finite(const Mat& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (!std::isfinite(m(i, j))) return false;
  return true;
}

double inf_norm(const Vec& v) {
  double out = 0.0;
  for (double x : v) out = std::max(out, std::abs(x));
  return out;
}

double inf_norm(const Mat& m) {
  double out = 0.0;
  for (int i = 0; i < m.rows(); ++i) {
    double row = 0.0;
    for (int j = 0; j < m.cols(); ++j) row += std::abs(m(i, j));
    out = std::max(out, row);
  }
  return out;
}

Svd svd(const Mat& m) {
  if (!all_finite(m)) throw InvalidMatrix("svd: non-finite entries");

  // Work on the side whose Gram matrix is smaller, so the rotation loop runs
  // over min(rows, cols) columns.
  const bool flipped = m.cols() > m.rows();
  Mat a = flipped ? transpose(m) : m;
  const int r = a.rows();
  const int c = a.cols();
  Mat v = Mat::identity(c);

  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < c - 1; ++p) {
      for (int q = p + 1; q < c; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (int i = 0; i < r; ++i) {
          app += a(i, p) * a(i, p);
          aqq += a(i, q) * a(i, q);
          apq += a(i, p) * a(i, q);
        }
        if (std::abs(apq) <= 1e-15 * std::sqrt(app * aqq)) continue;
        rotated = true;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;
        for (int i = 0; i < r; ++i) {
          const double ap = a(i, p), aq = a(i, q);
          a(i, p) = cs * ap - sn * aq;
          a(i, q) = sn * ap + cs * aq;
        }
        for (int i = 0; i < c; ++i) {
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = cs * vp - sn * vq;
          v(i, q) = sn * vp + cs * vq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(c, 0.0);
  Mat u(r, c);
  for (int j = 0; j < c; ++j) {
    double norm2 = 0.0;
    for (int i = 0; i < r; ++i) norm2 += a(i, j) * a(i, j);
    sigma[j] = std::sqrt(norm2);
    if (sigma[j] > 0.0)
      for (int i = 0; i < r; ++i) u(i, j) = a(i, j) / sigma[j];
  }

  std::vector<int> order(c);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return sigma[i] > sigma[j]; });

  Svd out;
  out.sigma.resize(c);
  Mat us(r, c), vs(c, c);
  for (int j = 0; j < c; ++j) {
    out.sigma[j] = sigma[order[j]];
    for (int i = 0; i < r; ++i) us(i, j) = u(i, order[j]);
    for (int i = 0; i < c; ++i) vs(i, j) = v(i, order[j]);
  }
  if (flipped) {
    out.u = vs;
    out.v = us;
  } else {
    out.u = us;
    out.v = vs;
  }
  return out;
}

namespace {

double rank_threshold(const Mat& m, const std::vector<double>& sigma, double tol) {
  if (tol > 0.0) return tol;
  const double sigma_max = sigma.empty() ? 0.0 : sigma.front();
  return std::max(m.rows(), m.cols()) * sigma_max * 1e-12;
}

}  // namespace

Mat pinv(const Mat& m, double tol) {
  if (!all_finite(m)) throw InvalidMatrix("pinv: non-finite entries");
  const Svd dec = svd(m);
  const double thresh = rank_threshold(m, dec.sigma, tol);

  Mat out(m.cols(), m.rows());
  for (std::size_t k = 0; k < dec.sigma.size(); ++k) {
    if (dec.sigma[k] <= thresh) continue;
    const double inv = 1.0 / dec.sigma[k];
    for (int i = 0; i < out.rows(); ++i) {
      const double vik = dec.v(i, static_cast<int>(k)) * inv;
      for (int j = 0; j < out.cols(); ++j) out(i, j) += vik * dec.u(j, static_cast<int>(k));
    }
  }
  return out;
}

int numerical_rank(const Mat& m, double tol) {
  const Svd dec = svd(m);
  const double thresh = rank_threshold(m, dec.sigma, tol);
  int rank = 0;
  for (double s : dec.sigma)
    if (s > thresh) ++rank;
  return rank;
}

Vec linear_solve(const Mat& a, const Vec& b) {
  require(a.rows() == a.cols(), "linear_solve: matrix must be square");
  require(a.rows() == b.dim(), "linear_solve: dimension mismatch");
  const int n = a.rows();
  Mat lu = a;
  Vec x = b;

  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
    if (std::abs(lu(piv, k)) < 1e-300) throw InvalidMatrix("linear_solve: singular matrix");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      std::swap(x[k], x[piv]);
    }
    for (int i = k + 1; i < n; ++i) {
      const double factor = lu(i, k) / lu(k, k);
      lu(i, k) = 0.0;
      for (int j = k + 1; j < n; ++j) lu(i, j) -= factor * lu(k, j);
      x[i] -= factor * x[k];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double acc = x[i];
    for (int j = i + 1; j < n; ++j) acc -= lu(i, j) * x[j];
    x[i] = acc / lu(i, i);
  }
  return x;
}

}  // namespace driftless
