#include "ramana/conic.hpp"

#include <cmath>
#include <utility>

namespace ramana {

namespace {
const double kSqrt2 = std::sqrt(2.0);
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}  // namespace

int svec_index(int order, int i, int j) {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= order) throw DimensionError("svec index out of range");
  // Row-by-row upper triangle: row i contributes (order - i) slots.
  return i * order - i * (i - 1) / 2 + (j - i);
}

Vec svec(const SymMat& x) {
  const int n = x.order();
  Vec v(ConicProgram::svec_dim(n));
  int k = 0;
  for (int i = 0; i < n; ++i) {
    v[k++] = x(i, i);
    for (int j = i + 1; j < n; ++j) v[k++] = kSqrt2 * x(i, j);
  }
  return v;
}

SymMat smat(const Vec& v, int order) {
  if (v.size() != static_cast<std::size_t>(ConicProgram::svec_dim(order)))
    throw DimensionError("svec length does not match order");
  SymMat x(order);
  int k = 0;
  for (int i = 0; i < order; ++i) {
    x.set(i, i, v[k++]);
    for (int j = i + 1; j < order; ++j) x.set(i, j, kInvSqrt2 * v[k++]);
  }
  return x;
}

int ConicProgram::psd_dim() const {
  int d = 0;
  for (int o : psd_orders) d += svec_dim(o);
  return d;
}

int ConicProgram::psd_offset(int blk) const {
  int d = 0;
  for (int i = 0; i < blk; ++i) d += svec_dim(psd_orders[i]);
  return d;
}

void ConicProgram::init(int rows) {
  A = Mat(rows, dim());
  b.assign(rows, 0.0);
  c.assign(dim(), 0.0);
}

void ConicProgram::validate() const {
  for (int o : psd_orders)
    if (o < 1) throw DimensionError("psd block order must be >= 1");
  if (nonneg < 0 || free_vars < 0)
    throw DimensionError("negative cone dimensions");
  if (A.cols() != dim()) throw DimensionError("coefficient width mismatch");
  if (b.size() != static_cast<std::size_t>(A.rows()))
    throw DimensionError("right-hand side length mismatch");
  if (c.size() != static_cast<std::size_t>(dim()))
    throw DimensionError("objective length mismatch");
  if (!psd_names.empty() && psd_names.size() != psd_orders.size())
    throw DimensionError("block label count mismatch");
}

void ConicProgram::add_psd_coeff(int row, int blk, const SymMat& coeff) {
  if (coeff.order() != psd_orders[blk])
    throw DimensionError("coefficient order does not match block");
  const Vec sv = svec(coeff);
  double* dst = (row < 0 ? c.data() : A.row(row)) + psd_offset(blk);
  for (std::size_t k = 0; k < sv.size(); ++k) dst[k] += sv[k];
}

void ConicProgram::add_nonneg_coeff(int row, int idx, double v) {
  if (idx < 0 || idx >= nonneg) throw DimensionError("nonneg index out of range");
  double* dst = (row < 0 ? c.data() : A.row(row)) + nonneg_offset();
  dst[idx] += v;
}

void ConicProgram::add_free_coeff(int row, int idx, double v) {
  if (idx < 0 || idx >= free_vars) throw DimensionError("free index out of range");
  double* dst = (row < 0 ? c.data() : A.row(row)) + free_offset();
  dst[idx] += v;
}

SymMat ConicProgram::psd_block_of(const Vec& z, int blk) const {
  const int off = psd_offset(blk);
  const int len = svec_dim(psd_orders[blk]);
  Vec v(z.begin() + off, z.begin() + off + len);
  return smat(v, psd_orders[blk]);
}

void ConicProgram::set_psd_block(Vec& z, int blk, const SymMat& x) const {
  const Vec sv = svec(x);
  const int off = psd_offset(blk);
  for (std::size_t k = 0; k < sv.size(); ++k) z[off + k] = sv[k];
}

}  // namespace ramana
