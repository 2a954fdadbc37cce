#ifndef RAMANA_SDP_HPP
#define RAMANA_SDP_HPP

#include <variant>

#include "ramana/symmat.hpp"

namespace ramana {

// Linear matrix inequality data for the pair
//   (P) sup c^T x  s.t.  B - sum_i x_i A_i  psd
//   (D) inf <B,Y>  s.t.  <A_i,Y> = c_i, Y psd.
// All matrices share order n; m >= 1 constraint matrices.
struct SdpInstance {
  int n = 0;
  int m = 0;
  std::vector<SymMat> A;
  SymMat B;
  Vec c;

  SdpInstance() : B(1) {}
  static SdpInstance create(std::vector<SymMat> a, SymMat b, Vec c);
};

// sum_i x_i A_i
SymMat apply_operator(const SdpInstance& inst, const Vec& x);
// (<A_1,Y>, ..., <A_m,Y>)
Vec adjoint(const SdpInstance& inst, const SymMat& y);

struct Slack {
  SymMat S;
  Vec x;
};
struct NotFeasible {
  // Unit direction with z^T S z = curvature < 0.
  Vec witness;
  double curvature;
};

// B - sum x_i A_i when psd within tol, otherwise an eigenvector witness.
std::variant<Slack, NotFeasible> slack_of(const SdpInstance& inst,
                                          const Vec& x, double tol);

struct DualFeasReport {
  bool feasible;
  double eq_residual;    // max_i |<A_i,Y> - c_i|
  double cone_lambda_min;
  double objective;      // <B,Y>
};

DualFeasReport check_dual_feasible(const SdpInstance& inst, const SymMat& y,
                                   double tol);

double primal_objective(const SdpInstance& inst, const Vec& x);
double dual_objective(const SdpInstance& inst, const SymMat& y);

// Invertible congruence x -> T^T x T applied to all instance data. Carries
// the inverse, determinant, condition number, and a composition log so that
// long reduction chains stay auditable.
class RescalingTransform {
 public:
  static RescalingTransform identity(int n);
  // Throws SingularMatrixError when T is not invertible to working precision.
  static RescalingTransform from(Mat t, const std::string& label,
                                 double cond_warn = 1e8);

  const Mat& T() const { return t_; }
  const Mat& T_inv() const { return tinv_; }
  int order() const { return t_.rows(); }
  double determinant() const { return det_; }
  double condition() const { return cond_; }
  const std::vector<std::string>& log() const { return log_; }
  // Restores an audit log verbatim (deserialization); the transform data is
  // untouched.
  void replace_log(std::vector<std::string> lines) { log_ = std::move(lines); }

  // this followed by next: T_total = T_this * T_next (column action order;
  // rescale(rescale(inst, this), next) == rescale(inst, composed)).
  RescalingTransform then(const RescalingTransform& next) const;

 private:
  RescalingTransform() = default;
  Mat t_, tinv_;
  double det_ = 1.0, cond_ = 1.0;
  std::vector<std::string> log_;
};

// A_i := T^T A_i T, B := T^T B T. Feasible x are unchanged; slacks map by
// the same congruence; dual points map by Y -> T^{-1} Y T^{-T}.
SdpInstance rescale(const SdpInstance& inst, const RescalingTransform& t);

// Y -> T^{-1} Y T^{-T}, the dual-side companion of rescale.
SymMat push_dual(const RescalingTransform& t, const SymMat& y);

}  // namespace ramana

#endif
