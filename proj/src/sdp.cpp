#include "ramana/sdp.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <utility>

namespace ramana {

Tolerances Tolerances::from_env() {
  Tolerances t;
  if (const char* env = std::getenv("RAMANA_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0 && std::isfinite(v)) {
      t.tol_eq = v;
      t.tol_cone = v;
    }
  }
  return t;
}

SdpInstance SdpInstance::create(std::vector<SymMat> a, SymMat b, Vec c) {
  if (a.empty()) throw DimensionError("instance needs at least one A_i");
  if (a.size() != c.size())
    throw DimensionError("objective length does not match constraint count");
  const int n = b.order();
  for (const SymMat& ai : a)
    if (ai.order() != n)
      throw DimensionError("constraint matrix order mismatch");
  SdpInstance inst;
  inst.n = n;
  inst.m = static_cast<int>(a.size());
  inst.A = std::move(a);
  inst.B = std::move(b);
  inst.c = std::move(c);
  return inst;
}

SymMat apply_operator(const SdpInstance& inst, const Vec& x) {
  if (x.size() != static_cast<std::size_t>(inst.m))
    throw DimensionError("operator argument length mismatch");
  SymMat s(inst.n);
  for (int i = 0; i < inst.m; ++i)
    if (x[i] != 0.0) s = s + inst.A[i].scaled(x[i]);
  return s;
}

Vec adjoint(const SdpInstance& inst, const SymMat& y) {
  if (y.order() != inst.n) throw DimensionError("adjoint argument order mismatch");
  Vec out(inst.m);
  for (int i = 0; i < inst.m; ++i) out[i] = inner_product(inst.A[i], y);
  return out;
}

std::variant<Slack, NotFeasible> slack_of(const SdpInstance& inst,
                                          const Vec& x, double tol) {
  SymMat s = inst.B - apply_operator(inst, x);
  PsdResult p = psd_check(s, tol);
  if (p.psd) return Slack{std::move(s), x};
  return NotFeasible{*p.witness, p.lambda_min};
}

DualFeasReport check_dual_feasible(const SdpInstance& inst, const SymMat& y,
                                   double tol) {
  DualFeasReport r;
  Vec ay = adjoint(inst, y);
  double res = 0.0;
  for (int i = 0; i < inst.m; ++i)
    res = std::max(res, std::abs(ay[i] - inst.c[i]));
  r.eq_residual = res;
  PsdResult p = psd_check(y, tol);
  r.cone_lambda_min = p.lambda_min;
  r.feasible = p.psd && res <= tol * (1.0 + norm_inf(inst.c));
  r.objective = inner_product(inst.B, y);
  return r;
}

double primal_objective(const SdpInstance& inst, const Vec& x) {
  if (x.size() != static_cast<std::size_t>(inst.m))
    throw DimensionError("objective argument length mismatch");
  return dot(inst.c, x);
}

double dual_objective(const SdpInstance& inst, const SymMat& y) {
  return inner_product(inst.B, y);
}

RescalingTransform RescalingTransform::identity(int n) {
  RescalingTransform r;
  r.t_ = Mat::identity(n);
  r.tinv_ = Mat::identity(n);
  r.det_ = 1.0;
  r.cond_ = 1.0;
  return r;
}

RescalingTransform RescalingTransform::from(Mat t, const std::string& label,
                                            double cond_warn) {
  if (t.rows() != t.cols()) throw DimensionError("rescaling must be square");
  RescalingTransform r;
  r.det_ = t.determinant();
  if (r.det_ == 0.0)
    throw SingularMatrixError("rescaling matrix is singular");
  r.tinv_ = t.inverse();
  // Residual check of the inverse: ||T T^{-1} - I||.
  const Mat resid = t * r.tinv_ - Mat::identity(t.rows());
  if (resid.max_abs() > 1e-6)
    throw SingularMatrixError("rescaling inverse failed residual check");
  SpectralDecomposition g = spectral(congruence(t, SymMat::identity(t.rows())));
  const double smin = std::sqrt(std::max(g.eigenvalues.front(), 0.0));
  const double smax = std::sqrt(std::max(g.eigenvalues.back(), 0.0));
  r.cond_ = (smin > 0) ? smax / smin : std::numeric_limits<double>::infinity();
  r.t_ = std::move(t);
  std::ostringstream os;
  os << label << " (order " << r.t_.rows() << ", cond " << r.cond_ << ")";
  r.log_.push_back(os.str());
  if (r.cond_ > cond_warn) {
    std::ostringstream warn;
    warn << "warning: condition number " << r.cond_ << " exceeds " << cond_warn;
    r.log_.push_back(warn.str());
  }
  return r;
}

RescalingTransform RescalingTransform::then(const RescalingTransform& next) const {
  RescalingTransform r;
  r.t_ = t_ * next.t_;
  r.tinv_ = next.tinv_ * tinv_;
  r.det_ = det_ * next.det_;
  SpectralDecomposition g =
      spectral(congruence(r.t_, SymMat::identity(r.t_.rows())));
  const double smin = std::sqrt(std::max(g.eigenvalues.front(), 0.0));
  const double smax = std::sqrt(std::max(g.eigenvalues.back(), 0.0));
  r.cond_ = (smin > 0) ? smax / smin : std::numeric_limits<double>::infinity();
  r.log_ = log_;
  r.log_.insert(r.log_.end(), next.log_.begin(), next.log_.end());
  return r;
}

SdpInstance rescale(const SdpInstance& inst, const RescalingTransform& t) {
  if (t.order() != inst.n) throw DimensionError("rescaling order mismatch");
  SdpInstance out;
  out.n = inst.n;
  out.m = inst.m;
  out.c = inst.c;
  out.A.reserve(inst.m);
  for (const SymMat& a : inst.A) out.A.push_back(congruence(t.T(), a));
  out.B = congruence(t.T(), inst.B);
  return out;
}

SymMat push_dual(const RescalingTransform& t, const SymMat& y) {
  return congruence(t.T_inv().transpose(), y);
}

}  // namespace ramana
