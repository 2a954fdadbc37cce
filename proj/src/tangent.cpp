#include "ramana/tangent.hpp"

#include <cmath>

namespace ramana {

TanMembership tan_membership_algebraic(const SymMat& v, const SymMat& u,
                                       double tol, double eps_rank) {
  if (v.order() != u.order())
    throw DimensionError("tangent membership order mismatch");
  const Mat p = projector_onto_range(u, eps_rank);
  const Mat vm = v.to_mat();
  // W = P V - (1/2) P V P: if V = W0 + W0^T with range(W0) in range(U) then
  // this W reproduces V exactly, and range(W) is in range(P) always.
  const Mat pv = p * vm;
  const Mat w = pv - (pv * p).scaled(0.5);
  const Mat sym = w + w.transpose();
  double res = (vm - sym).frob_norm();
  TanMembership out;
  out.member = res <= tol * (1.0 + v.frob_norm());
  out.W = w;
  out.residual = res;
  return out;
}

BlockMask tan_block_pattern(int n, int s) {
  if (s < 0 || s > n) throw DimensionError("block pattern size out of range");
  return BlockMask{n, s};
}

TangentWitness compute_beta(const SymMat& u, const Mat& w, double margin,
                            double eps_rank, double range_tol) {
  if (w.rows() != u.order() || w.cols() != u.order())
    throw DimensionError("witness factor shape mismatch");
  if (!range_contained(w, u, range_tol, eps_rank))
    throw Error("witness factor range escapes range(U)");
  const SymMat uplus = pseudo_inverse(u, eps_rank);
  const Mat h = uplus.to_mat() * w;
  const SymMat hut = congruence(h, u);  // H^T U H
  SpectralDecomposition d = spectral(hut);
  const double lmax = std::max(0.0, d.eigenvalues.back());
  TangentWitness wit;
  wit.W = w;
  wit.beta = (1.0 + margin) * lmax;
  return wit;
}

SymMat witness_matrix(const SymMat& u, const TangentWitness& wit) {
  const int n = u.order();
  if (wit.W.rows() != n || wit.W.cols() != n)
    throw DimensionError("witness shape mismatch");
  SymMat m(2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) m.set(i, j, u(i, j));
    for (int j = 0; j < n; ++j) m.set(i, n + j, wit.W(i, j));
    m.set(n + i, n + i, wit.beta);
  }
  return m;
}

bool verify_witness(const SymMat& u, const SymMat& v,
                    const TangentWitness& wit, double tol) {
  if (v.order() != u.order()) return false;
  if (wit.W.rows() != u.order() || wit.W.cols() != u.order()) return false;
  if (!(wit.beta >= 0.0)) return false;
  const Mat sym = wit.W + wit.W.transpose();
  double res = (v.to_mat() - sym).frob_norm();
  if (res > tol * (1.0 + v.frob_norm())) return false;
  return psd_check(witness_matrix(u, wit), tol).psd;
}

SymMat tan_transform(const SymMat& u, const SymMat& v,
                     const RescalingTransform& t, double tol) {
  TanMembership mem = tan_membership_algebraic(v, u, tol);
  if (!mem.member)
    throw Error("tan_transform precondition failed: V not tangent at U");
  return congruence(t.T(), v);
}

}  // namespace ramana
