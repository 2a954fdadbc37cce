#ifndef RAMANA_TANGENT_HPP
#define RAMANA_TANGENT_HPP

#include "ramana/sdp.hpp"
#include "ramana/symmat.hpp"

namespace ramana {

// tan(U) = { W + W^T : range(W) contained in range(U) } for U psd. Membership
// of V is equivalent to the existence of a scalar beta >= 0 making
//   M(W, beta) = [ U   W  ]
//                [ W^T bI ]
// positive semidefinite for some W with W + W^T = V; the pair (W, beta) is a
// checkable witness of membership.
struct TangentWitness {
  Mat W;
  double beta = 0.0;
};

struct TanMembership {
  bool member;
  // Candidate W = P V - (1/2) P V P with P the projector onto range(U).
  // When member, W + W^T reproduces V within tolerance and range(W) lies in
  // range(U) by construction.
  Mat W;
  double residual;  // ||V - (W + W^T)||_F
};

// Decides membership of V in tan(U) by projecting onto the range of U.
// Accepts iff residual <= tol * (1 + ||V||_F). Requires U psd.
TanMembership tan_membership_algebraic(const SymMat& v, const SymMat& u,
                                       double tol, double eps_rank = 1e-9);

// For U = 0_{n-s} (+) I_s, tan(U) is exactly the set of symmetric matrices
// whose leading (n-s) x (n-s) block vanishes.
struct BlockMask {
  int n, s;
  bool forced_zero(int i, int j) const { return i < n - s && j < n - s; }
};
BlockMask tan_block_pattern(int n, int s);

// Builds the witness scalar for a given W with range(W) in range(U):
// H = U^+ W, beta = (1 + margin) * lambda_max(H^T U H). The margin keeps the
// Schur complement safely psd under roundoff; W = 0 yields beta = 0.
TangentWitness compute_beta(const SymMat& u, const Mat& w,
                            double margin = 0.1, double eps_rank = 1e-9,
                            double range_tol = 1e-8);

// Checks W + W^T = V within tol and M(W, beta) psd within tol.
bool verify_witness(const SymMat& u, const SymMat& v,
                    const TangentWitness& wit, double tol);

// Assembles M(W, beta) for U of order n: a symmetric matrix of order 2n.
SymMat witness_matrix(const SymMat& u, const TangentWitness& wit);

// Congruence images: V in tan(U) implies T^T V T in tan(T^T U T). Verifies
// the precondition before transforming.
SymMat tan_transform(const SymMat& u, const SymMat& v,
                     const RescalingTransform& t, double tol);

}  // namespace ramana

#endif
