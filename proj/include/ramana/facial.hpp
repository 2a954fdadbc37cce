#ifndef RAMANA_FACIAL_HPP
#define RAMANA_FACIAL_HPP

#include <variant>

#include "ramana/sdp.hpp"
#include "ramana/solver.hpp"

namespace ramana {

struct FacialOptions {
  Tolerances tol;
  SolverOptions solver;
  bool verbose = false;
};

// Outcome of the alternative pair at face order s:
//   (sup)  sup { t : t <= 1, B - sum x_i A_i - t (I_s (+) 0) psd on the face }
//   (inf)  inf { <B,Y> + u : <A_i,Y> = 0, tr Y(1:s) + u = 1, u >= 0,
//                Y(1:s) psd, entries outside the leading s x s block free }.
// The cap keeps the pair solvable even when the margin is unbounded; the
// common value is min(margin, 1). Exactly one of the two holds: a strictly
// positive value with a maximizer x (the slack has rank s on the face), or
// value zero with a minimizing Y that exposes a smaller face.
struct GordanPositive {
  double t;  // common optimal value min(margin, 1), > tol_fr
  Vec x;     // maximizer: B - sum x_i A_i - t (I_s (+) 0) psd
};
struct GordanZero {
  SymMat y;  // minimizer: <A_i,Y> = 0, <B,Y> = 0, tr Y(1:s) = 1, Y(1:s) psd
};
using GordanOutcome = std::variant<GordanPositive, GordanZero>;

// Solves the pair with one interior-point run on the (inf) form; the (sup)
// data is read off the multipliers. Throws ConvergenceError when the solve
// ends in a state too ambiguous to classify against tol_fr.
GordanOutcome gordan_pair(const SdpInstance& inst, int s,
                          const FacialOptions& opts = {});

// One reduction step: diagonalize the leading s x s block of the certificate
// Y, split its range (rank r_step) from its kernel, and rescale the instance
// so the certificate becomes 0 (+) I_{r_step} (+) [previously eliminated].
struct ReduceStep {
  SdpInstance inst;              // rescaled instance
  RescalingTransform transform;  // inst == rescale(input, transform)
  int rank = 0;                  // r_step >= 1
  SymMat cert;                   // certificate in the new frame, cleaned
  ReduceStep() : inst(), transform(RescalingTransform::identity(1)), cert(1) {}
};
ReduceStep reduce_step(const SdpInstance& inst, int s, const SymMat& y,
                       const FacialOptions& opts = {});

// Proof object produced by the reduction loop. In the frame reached by
// `transform`, certificate i (order n) has the block pattern
//   [ 0  0  * ]      rows n - sum_{l<=i} r_l | r_i | sum_{l<i} r_l
//   [ 0  I  * ]
//   [ *  *  * ]
// and satisfies <A'_j, Y_i> = 0, <B', Y_i> = 0 against the instance already
// reduced by the preceding steps. Together the identity blocks pin every
// slack of the rescaled instance inside the leading r x r corner, which
// certifies that r is the maximum slack rank.
struct FacialCertificate {
  int n = 0;
  int face_rank = 0;             // r
  std::vector<int> block_sizes;  // r_1..r_k, summing to n - r
  std::vector<SymMat> ys;        // certificates, final frame, cleaned
  RescalingTransform transform;  // reduced == rescale(original, transform)
  FacialCertificate() : transform(RescalingTransform::identity(1)) {}
};

struct MaxRankSlackReport {
  Slack slack;                 // in the reduced frame; matrix ~= I_r (+) 0
  int rank = 0;                // r = max rank over all slacks
  double slater_margin = 0.0;  // lambda_min of the raw leading r x r slack
  MaxRankSlackReport() : slack{SymMat(1), Vec{}} {}
};

struct FacialReductionResult {
  SdpInstance reduced;  // all slacks live in the leading r x r corner
  FacialCertificate cert;
  MaxRankSlackReport slack_report;
  int steps = 0;  // k, number of reducing certificates
};

// Runs the reduction loop from s = n down to the maximal face, then rescales
// once more so the chosen maximum-rank slack is exactly I_r (+) 0. Requires
// a feasible instance; with no feasible x at all the loop still terminates
// but the final residual check throws.
FacialReductionResult facial_reduction(const SdpInstance& inst,
                                       const FacialOptions& opts = {});

struct CertificateCheck {
  bool valid = false;
  double max_pattern_residual = 0.0;  // worst deviation from the 0/I pattern
  double max_eq_residual = 0.0;       // worst |<A'_j,Y_i>| or |<B',Y_i>|
  std::vector<std::string> failures;
};

// Re-derives everything from the original instance and the certificate: the
// rescaled instance, the block pattern of every Y_i, the orthogonality
// equations, and the index-elimination argument that forces every slack into
// the leading face_rank x face_rank corner.
CertificateCheck verify_certificate(const SdpInstance& original,
                                    const FacialCertificate& cert, double tol);

}  // namespace ramana

#endif
