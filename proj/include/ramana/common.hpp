#ifndef RAMANA_COMMON_HPP
#define RAMANA_COMMON_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace ramana {

using Vec = std::vector<double>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};

// Matrix expected to be symmetric deviates beyond the allowed tolerance.
struct SymmetryError : Error {
  using Error::Error;
};

// Matrix expected to be positive semidefinite is not, within tolerance.
struct NotPsdError : Error {
  using Error::Error;
};

struct SingularMatrixError : Error {
  using Error::Error;
};

// Iterative routine (Jacobi sweep, interior-point loop) hit its cap.
struct ConvergenceError : Error {
  using Error::Error;
};

struct ParseError : Error {
  int line;
  ParseError(int line_, const std::string& msg)
      : Error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

// Verification tolerances used across the library. Defaults are chosen for
// well-scaled instances of modest order; RAMANA_TOL overrides the generic
// verification tolerances tol_eq and tol_cone.
struct Tolerances {
  // Relative threshold separating zero from positive eigenvalues.
  double eps_rank = 1e-9;
  // Allowed asymmetry, relative to the matrix norm, when adopting raw data.
  double sym_tol = 1e-8;
  // Equality-constraint residuals in verification routines.
  double tol_eq = 1e-8;
  // Cone (eigenvalue) violations in verification routines.
  double tol_cone = 1e-8;
  // Decision threshold separating a positive auxiliary value from zero in
  // facial reduction. Deliberately much looser than the solver's gap target.
  double tol_fr = 1e-6;
  // Rank threshold applied to solver-produced certificates, whose spurious
  // eigenvalues sit near the solver gap rather than near machine epsilon.
  double fr_rank_eps = 1e-6;
  // Entries of a certificate smaller than tol_clean * norm are snapped to
  // their pattern value after a reduction step.
  double tol_clean = 1e-8;
  // Safety margin on the tangent-witness scalar beta.
  double beta_margin = 0.1;
  // Iterate sup-norm beyond which a converging value is flagged as evidence
  // of dual non-attainment. A heuristic, reported as such.
  double norm_blowup = 1e4;
  // Condition number of a rescaling beyond which a warning is logged.
  double cond_warn = 1e8;

  static Tolerances from_env();
};

}  // namespace ramana

#endif
