#ifndef RAMANA_SOLVER_HPP
#define RAMANA_SOLVER_HPP

#include "ramana/conic.hpp"

namespace ramana {

enum class SolveStatus { Optimal, NearOptimal, NumericalTrouble, Diverging };
const char* to_string(SolveStatus s);

struct IterRecord {
  int iter;
  double mu;
  double rel_gap;
  double pinf, dinf;
  double znorm, ynorm, snorm;
  double alpha_p, alpha_d;
};

struct SolverOptions {
  double gap_tol = 1e-9;
  double feas_tol = 1e-9;
  int max_iter = 200;
  // Fixed centering parameter of the plain method.
  double sigma = 0.25;
  // Fraction-to-boundary factor for both step lengths.
  double step_frac = 0.98;
  // Adapt sigma from an affine probe (predictor-style centering). Off by
  // default; the plain fixed-sigma method is the deterministic baseline.
  bool adaptive_centering = false;
  bool verbose = false;
};

// Primal-dual path-following interior-point method over
//   min <c,z> s.t. A z = b, z in psd x nonneg x free,
// with Nesterov-Todd scaling on the psd blocks, a logarithmic barrier on the
// nonnegative part, and free variables carried directly in the KKT system.
// One symmetric indefinite factorization per iteration. Programs without
// strictly feasible points are run under the same iteration cap and yield a
// NearOptimal / Diverging / NumericalTrouble status together with the
// iterate-norm history, which downstream analysis consumes as evidence.
struct SolveResult {
  SolveStatus status = SolveStatus::NumericalTrouble;
  double primal_value = 0.0;  // <c,z>
  double dual_value = 0.0;    // <b,y>
  double gap_abs = 0.0;
  double pinf = 0.0, dinf = 0.0;
  Vec z, y, s;  // s lives on the cone coordinates, zero on the free part
  int iterations = 0;
  std::vector<IterRecord> history;
  std::string message;

  double max_iterate_norm() const;
};

SolveResult solve(const ConicProgram& prog, const SolverOptions& opts = {});

// Independent recheck of a solver outcome against the program data, using
// only elementary arithmetic and eigenvalue bounds.
struct CertifyReport {
  bool ok;
  double primal_eq_residual;
  double primal_cone_violation;  // most negative eigenvalue / entry, >= 0
  double dual_eq_residual;
  double dual_cone_violation;
  double free_slack_abs;  // dual slack magnitude on free coordinates
  double gap_abs;
};

CertifyReport certify(const ConicProgram& prog, const SolveResult& r,
                      double tol);

}  // namespace ramana

#endif
