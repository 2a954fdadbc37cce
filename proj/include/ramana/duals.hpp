#ifndef RAMANA_DUALS_HPP
#define RAMANA_DUALS_HPP

#include <limits>
#include <string>
#include <vector>

#include "ramana/facial.hpp"
#include "ramana/tangent.hpp"

namespace ramana {

// ---------------------------------------------------------------------------
// Program builders. All three duals of
//   (P) sup c^T x  s.t.  B - sum_i x_i A_i psd
// are rendered as equality-form conic programs for the interior-point solver;
// the program's primal optimum is the dual value in question.
// ---------------------------------------------------------------------------

// min <B,Y> s.t. <A_i,Y> = c_i, Y psd of order n.
ConicProgram build_classical_dual(const SdpInstance& inst);

// (P) itself in equality form: variables (S psd, x free) with
// S + sum_k x_k A_k = B entrywise and objective -c^T x, so that
// val(P) = -optimum. Used as numerical evidence for the primal value.
ConicProgram build_primal(const SdpInstance& inst);

// The exact dual available once a maximum-rank slack I_r (+) 0 is known:
// min <B,Y> s.t. <A_i,Y> = c_i, with only the leading r x r block of Y conic
// and every entry reaching past it a free scalar. Its value equals val(P)
// and is attained when finite.
ConicProgram build_strong_dual(const SdpInstance& reduced, int face_rank);

struct StrongDualPoint {
  SymMat y;
  int face_rank = 0;
  StrongDualPoint() : y(1) {}
  StrongDualPoint(SymMat y_, int r) : y(std::move(y_)), face_rank(r) {}
};

// Reassembles the matrix point of build_strong_dual from a solver result.
StrongDualPoint strong_dual_point_from(const SdpInstance& reduced,
                                       int face_rank, const SolveResult& res);

// ---------------------------------------------------------------------------
// The extended exact dual. Variables are chained: for levels i = 1..n+1,
//   U_i psd,  V_i = W_i + W_i^T with range(W_i) inside range(U_{i-1}),
//   A*(U_i + V_i) = 0 and <B, U_i + V_i> = 0 for i <= n,
//   A*(U_{n+1} + V_{n+1}) = c,  objective <B, U_{n+1} + V_{n+1}>.
// Its value equals val(P) whenever (P) is feasible, and is attained when
// finite -- no constraint qualification required.
// ---------------------------------------------------------------------------

struct RamanaSolution {
  int n = 0;
  std::vector<SymMat> U;  // indices 0..n+1; U[0] = 0
  std::vector<SymMat> V;  // indices 0..n+1; V[0] = 0, V[1] = 0
  // Tangency witnesses per level, aligned with U/V (entries 0 and 1 unused,
  // kept as zero witnesses). Empty vector or an empty W mean "absent";
  // verification then falls back to the algebraic membership test.
  std::vector<TangentWitness> witnesses;

  double objective(const SdpInstance& inst) const;
};

// Scalar unknowns of the rendering (svec coordinates + W entries + betas):
//   vars(n) = (n+1) n(n+1)/2 + n (n(2n+1) + n^2 + 1)
// and its equality rows:
//   cons(n,m) = n(m+1) + m + n(2n^2 + n).
// Both polynomial in (n, m), the point of the construction.
long ramana_var_count(int n);
long ramana_con_count(int n, int m);

// The rendering keeps V_i affine (never a variable): each level i >= 2 adds
// the free n x n block W_i, a free scalar beta_i, and a PSD block M_i of
// order 2n linked entrywise to [[U_{i-1}, W_i], [W_i^T, beta_i I]]. Level 1
// hard-codes W_1 = 0, beta_1 = 0 since U_0 = 0 forces V_1 = 0.
struct RamanaDualProgram {
  ConicProgram prog;
  int n = 0, m = 0;
  long var_count = 0;
  long con_count = 0;

  int u_block(int level) const { return level - 1; }            // 1..n+1
  int m_block(int level) const { return n + 1 + (level - 2); }  // 2..n+1
  int w_index(int level, int i, int j) const {
    return (level - 2) * (n * n + 1) + i * n + j;
  }
  int beta_index(int level) const {
    return (level - 2) * (n * n + 1) + n * n;
  }
};

RamanaDualProgram build_ramana_dual(const SdpInstance& inst);

// Reads U, V, and the (W, beta) witnesses off a solver point.
RamanaSolution ramana_solution_from_conic(const RamanaDualProgram& rd,
                                          const Vec& z);

struct RamanaCheck {
  bool valid = false;
  double max_eq_residual = 0.0;       // operator equations, all levels
  double max_cone_violation = 0.0;    // most negative U_i eigenvalue, as >= 0
  double max_tangent_residual = 0.0;  // worst ||V - (W + W^T)||_F defect
  double objective = 0.0;             // <B, U_{n+1} + V_{n+1}>
  std::vector<std::string> failures;
};

// Feasibility of a point of the extended dual against the instance: U_0 and
// V_0 vanish, each U_i is psd, each V_i is tangent at U_{i-1} (by witness
// when given, by reprojection otherwise), homogeneous levels annihilate
// (A, B), and the top level reproduces c.
RamanaCheck verify_ramana(const SdpInstance& inst, const RamanaSolution& sol,
                          double tol);

// Builds a feasible extended-dual point with objective <B, Y*> from a
// reduced-face optimal point and the reduction certificates: levels
// 1..n-k stay zero, level n-k+i carries U := 0 (+) I_{r_1+..+r_i} and
// V := Y_i - U, and the top level splits Y* along the face. The output is
// verified before it is returned. Throws on an invalid certificate or an
// infeasible Y*.
RamanaSolution lift_to_ramana(const SdpInstance& reduced,
                              const StrongDualPoint& ystar,
                              const FacialCertificate& cert, double tol);

struct ExtractResult {
  StrongDualPoint point;
  SdpInstance final_inst;       // instance after the sweep congruences
  RescalingTransform trail;     // composition of the sweep transforms
  double objective = 0.0;
  ExtractResult() : trail(RescalingTransform::identity(1)) {}
};

// The reverse direction, for an instance whose maximum-rank slack is
// I_r (+) 0: sweeps levels i = 1..n, checking <Z, U_i> ~ 0 and rotating the
// trailing block of U_i onto its eigenbasis with T_i = I_r (+) Q_i (applied
// to the instance and every level; earlier levels are deliberately not
// re-normalized afterwards). Returns Y := U_{n+1} + V_{n+1}, whose leading
// r x r block is psd, with the objective preserved.
ExtractResult extract_strong_dual_point(const SdpInstance& reduced,
                                        const RamanaSolution& sol,
                                        int face_rank, double tol);

// Congruence image of a whole extended-dual point under a rescaling: U and V
// map by Y -> T^{-1} Y T^{-T}, witnesses are remapped the same way and their
// safety scalars recomputed. Feasible points of rescale(inst, T) result,
// with the objective unchanged.
RamanaSolution rescale_ramana_solution(const RamanaSolution& sol,
                                       const RescalingTransform& t,
                                       const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Gap analysis: the whole pipeline on one instance.
// ---------------------------------------------------------------------------

struct AnalyzeOptions {
  Tolerances tol;
  SolverOptions solver;
  // Also run the interior-point method directly on the rendered extended
  // dual (cross-check; the verified lifted point is the primary value).
  bool solve_rendered = true;
  bool verbose = false;
};

// ---------------------------------------------------------------------------
// Exact value of the classical dual. (D) is itself a semidefinite program;
// writing its feasible set as Y0 + span{N_j} -- Y0 a particular solution of
// <A_i, Y> = c_i and {N_j} an orthonormal basis of the orthogonal complement
// of span{A_i} in Sym(n) -- turns it into the inequality form
//   (D')  sup_t  sum_j t_j <-B, N_j>   s.t.  sum_j t_j (-N_j) psd-below Y0,
// with val(D) = <B, Y0> - val(D'). The same facial reduction + reduced-dual
// pipeline then evaluates val(D') with no constraint qualification needed,
// which a direct interior-point run on (D) cannot promise.
// ---------------------------------------------------------------------------

struct ClassicalDualExact {
  double value = std::numeric_limits<double>::quiet_NaN();
  bool infeasible = false;  // value +inf: c unreachable, or the affine set
                            // misses the cone entirely
  std::string status;       // solver status backing the value, or
                            // "unique-point" when the affine set is a point
  double gap_bound = 0.0;   // |primal - dual| of the backing solve; a
                            // rigorous error bound on `value`, because the
                            // surrogate pair has zero gap by construction
  int face_rank = 0;        // of the surrogate (D')
  int steps = 0;
};

// Throws when the surrogate pipeline cannot classify the instance.
ClassicalDualExact classical_dual_exact(const SdpInstance& inst,
                                        const AnalyzeOptions& opts = {});

struct GapReport {
  int n = 0, m = 0;

  int face_rank = 0;
  int reduction_steps = 0;
  std::vector<int> block_sizes;
  double slater_margin = 0.0;
  double transform_condition = 1.0;

  // Values; NaN marks "not available" (a failed sub-step, see warnings).
  double primal_value = std::numeric_limits<double>::quiet_NaN();
  double classical_dual_value = std::numeric_limits<double>::quiet_NaN();
  double strong_dual_value = std::numeric_limits<double>::quiet_NaN();
  double ramana_value = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();

  std::string classical_status, strong_status, primal_status,
      ramana_solver_status;
  // "attained" | "suspected-non-attained" | "unknown". The non-attainment
  // flag is heuristic evidence: the value tolerance was reached while the
  // iterate norm exceeded norm_blowup.
  std::string classical_attainment = "unknown";
  double classical_max_iterate_norm = 0.0;

  bool certificate_valid = false;
  double certificate_eq_residual = 0.0;
  double certificate_pattern_residual = 0.0;

  bool ramana_verified = false;    // the lifted point passed verify_ramana
  bool ramana_attained = false;    // its objective equals the value => attained
  double ramana_residual = 0.0;

  double ramana_solver_value = std::numeric_limits<double>::quiet_NaN();
  double primal_solver_value = std::numeric_limits<double>::quiet_NaN();
  double extract_objective = std::numeric_limits<double>::quiet_NaN();

  std::vector<std::string> warnings;
};

// Facial reduction, the three dual solves, lift + extract cross-checks, and
// the attainment heuristic, assembled into one report. Sub-step failures are
// recorded as warnings and leave their values NaN; the report is always
// produced. gap := classical_dual_value - ramana_value.
GapReport gap_analysis(const SdpInstance& inst,
                       const AnalyzeOptions& opts = {});

}  // namespace ramana

#endif
