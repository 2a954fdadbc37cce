#ifndef RAMANA_SYMMAT_HPP
#define RAMANA_SYMMAT_HPP

#include <optional>

#include "ramana/common.hpp"
#include "ramana/mat.hpp"

namespace ramana {

// Symmetric matrix of order n >= 1, stored as a full row-major square so the
// congruence and inner-product loops stay branch-free. Symmetry is an
// invariant: every mutator writes both triangles, and adoption of raw data
// symmetrizes after checking the deviation against sym_tol * norm.
class SymMat {
 public:
  explicit SymMat(int n);
  static SymMat identity(int n);
  static SymMat diag(const Vec& d);
  // Symmetrize (X + X^T)/2 after rejecting asymmetry beyond tol * max_abs(X).
  static SymMat from_dense(const Mat& x, double sym_tol = 1e-8);
  static SymMat from_rows(int n, Vec row_major, double sym_tol = 1e-8);

  int order() const { return n_; }
  double operator()(int i, int j) const { return a_[idx(i, j)]; }
  void set(int i, int j, double v);
  void add(int i, int j, double v);

  const double* data() const { return a_.data(); }
  Mat to_mat() const;

  SymMat operator+(const SymMat& rhs) const;
  SymMat operator-(const SymMat& rhs) const;
  SymMat scaled(double alpha) const;

  double trace() const;
  double frob_norm() const;
  double max_abs() const;
  bool is_zero(double tol) const { return max_abs() <= tol; }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * n_ + j;
  }
  int n_;
  Vec a_;
};

// trace(X Y), bilinear pairing of symmetric matrices.
double inner_product(const SymMat& x, const SymMat& y);

struct SpectralDecomposition {
  Vec eigenvalues;   // ascending
  Mat eigenvectors;  // orthonormal columns, column i pairs with eigenvalues[i]
};

// Cyclic Jacobi. Accurate and dependency-free at the orders this library
// targets (n up to a few dozen). Throws ConvergenceError if the off-diagonal
// mass fails to vanish within the sweep cap.
SpectralDecomposition spectral(const SymMat& x);

struct PsdResult {
  bool psd;
  double lambda_min;
  double lambda_max;
  // For a rejected matrix: unit vector z with z^T X z = lambda_min < 0.
  std::optional<Vec> witness;
};

// X is accepted as psd iff lambda_min >= -tol * (1 + max |lambda|).
PsdResult psd_check(const SymMat& x, double tol);

// Count of eigenvalues above eps_rank * max(1, lambda_max). Requires X psd
// within the same relative tolerance; throws NotPsdError otherwise.
int numerical_rank(const SymMat& x, double eps_rank);

// Rows/columns r..s of Y, 1-based inclusive.
SymMat principal_submatrix(const SymMat& y, int r, int s);

SymMat diag_concat(const SymMat& a, const SymMat& b);
Mat diag_concat(const Mat& a, const Mat& b);

// Orthogonal projector onto the span of U's eigenvectors with eigenvalue
// above eps_rank * lambda_max. U must be psd within eps_rank.
Mat projector_onto_range(const SymMat& u, double eps_rank);

// Moore-Penrose pseudoinverse restricted to the same eigenvalue cut.
SymMat pseudo_inverse(const SymMat& u, double eps_rank);

// Spectral-norm test of (I - P_U) W against tol * (1 + ||W||_2).
bool range_contained(const Mat& w, const SymMat& u, double tol,
                     double eps_rank = 1e-9);

// ||A||_2 for a rectangular matrix, via the Gram matrix.
double spectral_norm(const Mat& a);

// T^T X T, symmetrized. The floating-point asymmetry of the product is
// negligible; it is averaged away rather than checked.
SymMat congruence(const Mat& t, const SymMat& x);

}  // namespace ramana

#endif
