#ifndef RAMANA_MAT_HPP
#define RAMANA_MAT_HPP

#include <cstddef>

#include "ramana/common.hpp"

namespace ramana {

// Dense rectangular matrix, row-major. Rectangular workhorse for congruence
// transforms, solver internals and eigenvector storage; the symmetric type
// with its own invariants lives in symmat.hpp.
class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(int rows, int cols);
  static Mat identity(int n);
  static Mat from_rows(int rows, int cols, Vec entries);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double operator()(int i, int j) const { return a_[idx(i, j)]; }
  double& operator()(int i, int j) { return a_[idx(i, j)]; }

  const double* data() const { return a_.data(); }
  double* data() { return a_.data(); }
  const double* row(int i) const { return a_.data() + static_cast<std::size_t>(i) * cols_; }
  double* row(int i) { return a_.data() + static_cast<std::size_t>(i) * cols_; }

  Mat transpose() const;
  Mat operator*(const Mat& rhs) const;
  Mat operator+(const Mat& rhs) const;
  Mat operator-(const Mat& rhs) const;
  Mat scaled(double alpha) const;

  Vec apply(const Vec& x) const;            // A x
  Vec apply_transpose(const Vec& x) const;  // A^T x

  double frob_norm() const;
  double max_abs() const;

  // LU with partial pivoting. Throws SingularMatrixError when a pivot falls
  // below a relative threshold.
  Mat inverse() const;
  double determinant() const;
  // Solves A X = B for X (A square).
  static Mat solve(const Mat& a, const Mat& b);

  bool same_shape(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * cols_ + j;
  }
  int rows_, cols_;
  Vec a_;
};

// Vector helpers on top of the kernel layer.
double dot(const Vec& a, const Vec& b);
double norm_inf(const Vec& a);
double norm2(const Vec& a);
void axpy_into(double alpha, const Vec& x, Vec& y);

}  // namespace ramana

#endif
