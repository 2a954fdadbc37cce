#ifndef RAMANA_CONIC_HPP
#define RAMANA_CONIC_HPP

#include <string>

#include "ramana/symmat.hpp"

namespace ramana {

// Equality-form conic program
//   min <c, z>  s.t.  A z = b,  z in K = psd blocks x nonneg orthant x R^f.
// PSD blocks are packed in scaled vector form (off-diagonals carry sqrt(2))
// so that matrix inner products coincide with coordinate dot products.
// Variable layout: [svec of each psd block][nonneg scalars][free scalars].
struct ConicProgram {
  std::vector<int> psd_orders;
  int nonneg = 0;
  int free_vars = 0;
  Vec c;
  Mat A;   // rows() x dim()
  Vec b;
  std::vector<std::string> psd_names;  // optional labels, empty or one per block

  static int svec_dim(int order) { return order * (order + 1) / 2; }

  int psd_dim() const;
  int cone_dim() const { return psd_dim() + nonneg; }
  int dim() const { return cone_dim() + free_vars; }
  int rows() const { return A.rows(); }

  int psd_offset(int blk) const;
  int nonneg_offset() const { return psd_dim(); }
  int free_offset() const { return cone_dim(); }

  // Allocates the coefficient matrix and right-hand side for `rows` rows.
  void init(int rows);
  void validate() const;

  // Adds <C, X_blk> to a row (or to the objective with row = -1).
  void add_psd_coeff(int row, int blk, const SymMat& coeff);
  void add_nonneg_coeff(int row, int idx, double v);
  void add_free_coeff(int row, int idx, double v);
  void set_rhs(int row, double v) { b[row] = v; }

  SymMat psd_block_of(const Vec& z, int blk) const;
  void set_psd_block(Vec& z, int blk, const SymMat& x) const;
};

// Scaled symmetric vectorization: for i <= j, entry (i,j) maps to x_ij for
// i = j and sqrt(2) x_ij otherwise, ordered row by row.
Vec svec(const SymMat& x);
SymMat smat(const Vec& v, int order);
int svec_index(int order, int i, int j);

}  // namespace ramana

#endif
