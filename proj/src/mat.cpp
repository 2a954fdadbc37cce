#include "ramana/mat.hpp"

#include <cmath>
#include <cstdlib>
#include <utility>

#include "ramana/kernels.hpp"

namespace ramana {

Mat::Mat(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw DimensionError("negative matrix dimension");
  a_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
}

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::from_rows(int rows, int cols, Vec entries) {
  if (entries.size() != static_cast<std::size_t>(rows) * cols)
    throw DimensionError("entry count does not match matrix shape");
  Mat m(rows, cols);
  m.a_ = std::move(entries);
  return m;
}

Mat Mat::transpose() const {
  Mat t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Mat Mat::operator*(const Mat& rhs) const {
  if (cols_ != rhs.rows_) throw DimensionError("matrix product shape mismatch");
  Mat c(rows_, rhs.cols_);
  kernels::gemm_acc(a_.data(), rhs.a_.data(), c.a_.data(), rows_, cols_,
                    rhs.cols_);
  return c;
}

Mat Mat::operator+(const Mat& rhs) const {
  if (!same_shape(rhs)) throw DimensionError("matrix sum shape mismatch");
  Mat c = *this;
  kernels::axpy(1.0, rhs.a_.data(), c.a_.data(), c.a_.size());
  return c;
}

Mat Mat::operator-(const Mat& rhs) const {
  if (!same_shape(rhs)) throw DimensionError("matrix difference shape mismatch");
  Mat c = *this;
  kernels::axpy(-1.0, rhs.a_.data(), c.a_.data(), c.a_.size());
  return c;
}

Mat Mat::scaled(double alpha) const {
  Mat c = *this;
  kernels::scale(alpha, c.a_.data(), c.a_.size());
  return c;
}

Vec Mat::apply(const Vec& x) const {
  if (x.size() != static_cast<std::size_t>(cols_))
    throw DimensionError("matrix-vector shape mismatch");
  Vec y(rows_);
  for (int i = 0; i < rows_; ++i) y[i] = kernels::dot(row(i), x.data(), cols_);
  return y;
}

Vec Mat::apply_transpose(const Vec& x) const {
  if (x.size() != static_cast<std::size_t>(rows_))
    throw DimensionError("matrix-vector shape mismatch");
  Vec y(cols_, 0.0);
  for (int i = 0; i < rows_; ++i)
    kernels::axpy(x[i], row(i), y.data(), cols_);
  return y;
}

double Mat::frob_norm() const {
  return std::sqrt(kernels::dot(a_.data(), a_.data(), a_.size()));
}

double Mat::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

namespace {

// LU decomposition with partial pivoting, in place. Returns the permutation
// sign, fills perm with row swaps. Throws on effective singularity.
double lu_decompose(Mat& a, std::vector<int>& perm) {
  const int n = a.rows();
  if (n != a.cols()) throw DimensionError("LU requires a square matrix");
  perm.resize(n);
  double scale = a.max_abs();
  const double pivot_floor = 1e-13 * (scale > 0 ? scale : 1.0);
  double sign = 1.0;
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(a(k, k));
    for (int i = k + 1; i < n; ++i) {
      const double v = std::abs(a(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best <= pivot_floor)
      throw SingularMatrixError("matrix is singular to working precision");
    perm[k] = p;
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      sign = -sign;
    }
    const double piv = a(k, k);
    for (int i = k + 1; i < n; ++i) {
      const double f = a(i, k) / piv;
      a(i, k) = f;
      if (f != 0.0)
        kernels::axpy(-f, a.row(k) + k + 1, a.row(i) + k + 1, n - k - 1);
    }
  }
  return sign;
}

void lu_solve_inplace(const Mat& lu, const std::vector<int>& perm, Vec& x) {
  const int n = lu.rows();
  // The factorization swaps whole rows, multipliers included, so the
  // right-hand side must be fully permuted before the triangular solves.
  for (int k = 0; k < n; ++k) std::swap(x[k], x[perm[k]]);
  for (int k = 0; k < n; ++k)
    for (int i = k + 1; i < n; ++i) x[i] -= lu(i, k) * x[k];
  for (int k = n - 1; k >= 0; --k) {
    for (int j = k + 1; j < n; ++j) x[k] -= lu(k, j) * x[j];
    x[k] /= lu(k, k);
  }
}

}  // namespace

Mat Mat::inverse() const {
  return solve(*this, identity(rows_));
}

double Mat::determinant() const {
  Mat lu = *this;
  std::vector<int> perm;
  double sign;
  try {
    sign = lu_decompose(lu, perm);
  } catch (const SingularMatrixError&) {
    return 0.0;
  }
  double det = sign;
  for (int i = 0; i < rows_; ++i) det *= lu(i, i);
  return det;
}

Mat Mat::solve(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) throw DimensionError("solve shape mismatch");
  Mat lu = a;
  std::vector<int> perm;
  lu_decompose(lu, perm);
  Mat x(b.rows(), b.cols());
  Vec col(a.rows());
  for (int j = 0; j < b.cols(); ++j) {
    for (int i = 0; i < b.rows(); ++i) col[i] = b(i, j);
    lu_solve_inplace(lu, perm, col);
    for (int i = 0; i < b.rows(); ++i) x(i, j) = col[i];
  }
  return x;
}

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("dot length mismatch");
  return kernels::dot(a.data(), b.data(), a.size());
}

double norm_inf(const Vec& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

double norm2(const Vec& a) {
  return std::sqrt(kernels::dot(a.data(), a.data(), a.size()));
}

void axpy_into(double alpha, const Vec& x, Vec& y) {
  if (x.size() != y.size()) throw DimensionError("axpy length mismatch");
  kernels::axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace ramana
