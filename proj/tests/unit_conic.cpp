#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ramana/conic.hpp"
#include "ramana/solver.hpp"
#include "test_common.hpp"

using namespace ramana;

namespace {

void svec_roundtrip() {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 7);
    const SymMat x = testutil::random_sym(rng, n);
    const Vec v = svec(x);
    REQUIRE(static_cast<int>(v.size()) == ConicProgram::svec_dim(n),
            "svec length");
    const SymMat back = smat(v, n);
    REQUIRE((back - x).max_abs() <= 1e-14 * (1.0 + x.max_abs()),
            "svec/smat round trip (trial " << trial << ")");
    // Inner products coincide with coordinate dot products.
    const SymMat y = testutil::random_sym(rng, n);
    const Vec w = svec(y);
    double dp = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) dp += v[i] * w[i];
    REQUIRE_NEAR(dp, inner_product(x, y), 1e-12 * (1.0 + std::abs(dp)),
                 "svec preserves the trace inner product");
  }
  // Off-diagonals carry sqrt(2).
  SymMat s(2);
  s.set(0, 1, 1.0);
  const Vec v = svec(s);
  REQUIRE_NEAR(v[svec_index(2, 0, 1)], std::sqrt(2.0), 1e-15,
               "off-diagonal scaling");
  REQUIRE_NEAR(v[svec_index(2, 0, 0)], 0.0, 0.0, "diagonal entry");
}

void trivial_lp() {
  // min x  s.t.  x = 1, x >= 0. Optimum 1.
  ConicProgram prog;
  prog.nonneg = 1;
  prog.init(1);
  prog.add_nonneg_coeff(-1, 0, 1.0);
  prog.add_nonneg_coeff(0, 0, 1.0);
  prog.set_rhs(0, 1.0);
  prog.validate();
  const SolveResult res = solve(prog);
  REQUIRE(res.status == SolveStatus::Optimal,
          "trivial LP must solve, got " << to_string(res.status));
  REQUIRE_NEAR(res.primal_value, 1.0, 1e-8, "trivial LP value");
  REQUIRE_NEAR(res.dual_value, 1.0, 1e-8, "trivial LP dual value");
  REQUIRE(certify(prog, res, 1e-6).ok, "trivial LP certificate");
}

void small_sdp() {
  // min <diag(1,2), X>  s.t.  tr X = 1, X psd. Optimum 1 at X = e11.
  ConicProgram prog;
  prog.psd_orders = {2};
  prog.init(1);
  Vec d = {1.0, 2.0};
  prog.add_psd_coeff(-1, 0, SymMat::diag(d));
  prog.add_psd_coeff(0, 0, SymMat::identity(2));
  prog.set_rhs(0, 1.0);
  prog.validate();
  const SolveResult res = solve(prog);
  REQUIRE(res.status == SolveStatus::Optimal, "small SDP must solve");
  REQUIRE_NEAR(res.primal_value, 1.0, 1e-7, "small SDP value");
  const SymMat x = prog.psd_block_of(res.z, 0);
  REQUIRE_NEAR(x(0, 0), 1.0, 1e-6, "optimal X concentrates on (0,0)");
  REQUIRE(certify(prog, res, 1e-6).ok, "small SDP certificate");

  // mu decreases geometrically once the iteration settles: the geometric
  // mean of successive ratios stays below 0.6 (fixed sigma = 0.25 plus
  // slack for the fraction-to-boundary cap).
  REQUIRE(res.history.size() >= 4, "history must be recorded");
  double log_sum = 0.0;
  int count = 0;
  for (std::size_t k = 3; k < res.history.size(); ++k) {
    const double ratio = res.history[k].mu / res.history[k - 1].mu;
    REQUIRE(ratio < 1.0, "mu must decrease at iteration " << k);
    log_sum += std::log(ratio);
    ++count;
  }
  REQUIRE(count > 0 && std::exp(log_sum / count) <= 0.6,
          "mu decay too slow: gmean ratio " << std::exp(log_sum / count));
}

void mixed_cones() {
  // min 2f + 3u + <diag(1,2), X>  s.t.  f = 1,  u + tr X = 1. Unique and
  // strictly complementary optimum: f = 1, u = 0, X = e00, value 3.
  {
    ConicProgram prog;
    prog.psd_orders = {2};
    prog.nonneg = 1;
    prog.free_vars = 1;
    prog.init(2);
    Vec d = {1.0, 2.0};
    prog.add_psd_coeff(-1, 0, SymMat::diag(d));
    prog.add_nonneg_coeff(-1, 0, 3.0);
    prog.add_free_coeff(-1, 0, 2.0);
    prog.add_free_coeff(0, 0, 1.0);
    prog.set_rhs(0, 1.0);
    prog.add_psd_coeff(1, 0, SymMat::identity(2));
    prog.add_nonneg_coeff(1, 0, 1.0);
    prog.set_rhs(1, 1.0);
    prog.validate();
    const SolveResult res = solve(prog);
    REQUIRE(res.status == SolveStatus::Optimal, "mixed-cone program solves");
    REQUIRE_NEAR(res.primal_value, 3.0, 1e-7, "mixed-cone optimum");
    REQUIRE_NEAR(prog.psd_block_of(res.z, 0)(0, 0), 1.0, 1e-6,
                 "psd mass sits at (0,0)");
    REQUIRE_NEAR(res.z[prog.free_offset()], 1.0, 1e-7, "free var pinned");
    REQUIRE(certify(prog, res, 1e-6).ok, "mixed-cone certificate");
  }

  // min f + u + <I, X>  s.t.  f + u + tr X = 2. The objective equals the
  // constraint row, so every feasible point scores 2 and the dual slack
  // vanishes identically at the optimum: no strict complementarity. The
  // method may stall a step short of full tolerance there; the value and
  // the independent certificate still have to come out clean.
  {
    ConicProgram prog;
    prog.psd_orders = {2};
    prog.nonneg = 1;
    prog.free_vars = 1;
    prog.init(1);
    prog.add_psd_coeff(-1, 0, SymMat::identity(2));
    prog.add_nonneg_coeff(-1, 0, 1.0);
    prog.add_free_coeff(-1, 0, 1.0);
    prog.add_psd_coeff(0, 0, SymMat::identity(2));
    prog.add_nonneg_coeff(0, 0, 1.0);
    prog.add_free_coeff(0, 0, 1.0);
    prog.set_rhs(0, 2.0);
    prog.validate();
    const SolveResult res = solve(prog);
    REQUIRE(res.status == SolveStatus::Optimal ||
                res.status == SolveStatus::NearOptimal,
            "degenerate mixed-cone program must not diverge, got "
                << to_string(res.status));
    REQUIRE_NEAR(res.primal_value, 2.0, 1e-6, "constant objective value");
    REQUIRE(certify(prog, res, 1e-6).ok, "degenerate mixed-cone certificate");
  }
}

// Strictly feasible primal-dual pairs built from known interior points.
ConicProgram random_strict_program(std::mt19937_64& rng, int& rows_out) {
  ConicProgram prog;
  const int blocks = 1 + static_cast<int>(rng() % 2);
  for (int b = 0; b < blocks; ++b)
    prog.psd_orders.push_back(2 + static_cast<int>(rng() % 5));
  prog.nonneg = static_cast<int>(rng() % 3);
  prog.free_vars = static_cast<int>(rng() % 2);
  const int rows = 2 + static_cast<int>(rng() % 6);
  rows_out = rows;
  prog.init(rows);

  // Interior primal point z0.
  Vec z0(prog.dim(), 0.0);
  for (std::size_t b = 0; b < prog.psd_orders.size(); ++b) {
    const int nb = prog.psd_orders[b];
    prog.set_psd_block(z0, static_cast<int>(b),
                       testutil::random_psd_rank(rng, nb, nb, 0.5, 2.0));
  }
  for (int i = 0; i < prog.nonneg; ++i)
    z0[prog.nonneg_offset() + i] = testutil::uniform(rng, 0.5, 2.0);
  for (int i = 0; i < prog.free_vars; ++i)
    z0[prog.free_offset() + i] = testutil::uniform(rng, -1.0, 1.0);

  // Random rows; b := A z0 keeps z0 feasible.
  for (int r = 0; r < rows; ++r) {
    for (std::size_t b = 0; b < prog.psd_orders.size(); ++b)
      prog.add_psd_coeff(r, static_cast<int>(b),
                         testutil::random_sym(rng, prog.psd_orders[b]));
    for (int i = 0; i < prog.nonneg; ++i)
      prog.add_nonneg_coeff(r, i, testutil::uniform(rng, -1.0, 1.0));
    for (int i = 0; i < prog.free_vars; ++i)
      prog.add_free_coeff(r, i, testutil::uniform(rng, -1.0, 1.0));
  }
  for (int r = 0; r < rows; ++r) {
    double dot = 0.0;
    for (int jcol = 0; jcol < prog.dim(); ++jcol)
      dot += prog.A(r, jcol) * z0[jcol];
    prog.set_rhs(r, dot);
  }

  // Interior dual slack: c := A^T y0 + s0 with s0 strictly inside the cone
  // and zero on the free part.
  Vec y0(rows);
  for (double& v : y0) v = testutil::uniform(rng, -1.0, 1.0);
  Vec s0(prog.dim(), 0.0);
  for (std::size_t b = 0; b < prog.psd_orders.size(); ++b) {
    const int nb = prog.psd_orders[b];
    prog.set_psd_block(s0, static_cast<int>(b),
                       testutil::random_psd_rank(rng, nb, nb, 0.5, 2.0));
  }
  for (int i = 0; i < prog.nonneg; ++i)
    s0[prog.nonneg_offset() + i] = testutil::uniform(rng, 0.5, 2.0);
  prog.c = prog.A.apply_transpose(y0);
  for (int i = 0; i < prog.dim(); ++i) prog.c[i] += s0[i];
  prog.validate();
  return prog;
}

void random_strict_instances() {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    int rows = 0;
    const ConicProgram prog = random_strict_program(rng, rows);
    const SolveResult res = solve(prog);
    REQUIRE(res.status == SolveStatus::Optimal,
            "strictly feasible program must reach Optimal, got "
                << to_string(res.status) << " (trial " << trial << ")");
    REQUIRE(res.gap_abs <= 1e-8 * (1.0 + std::abs(res.primal_value)),
            "gap " << res.gap_abs << " too large (trial " << trial << ")");
    const CertifyReport cr = certify(prog, res, 1e-6);
    REQUIRE(cr.ok, "independent certification failed (trial " << trial
                                                              << ")");
  }
}

void row_permutation_invariance() {
  std::mt19937_64 rng(43);
  int rows = 0;
  const ConicProgram prog = random_strict_program(rng, rows);
  const SolveResult base = solve(prog);
  REQUIRE(base.status == SolveStatus::Optimal, "base program solves");

  // Reverse the row order; the feasible set is identical.
  ConicProgram perm = prog;
  for (int r = 0; r < rows; ++r) {
    for (int jcol = 0; jcol < prog.dim(); ++jcol)
      perm.A(r, jcol) = prog.A(rows - 1 - r, jcol);
    perm.b[r] = prog.b[rows - 1 - r];
  }
  const SolveResult res = solve(perm);
  REQUIRE(res.status == SolveStatus::Optimal, "permuted program solves");
  REQUIRE_NEAR(res.primal_value, base.primal_value,
               1e-9 * (1.0 + std::abs(base.primal_value)),
               "row permutation must not change the optimum");
}

void certify_thresholds() {
  ConicProgram prog;
  prog.psd_orders = {2};
  prog.init(1);
  Vec d = {1.0, 2.0};
  prog.add_psd_coeff(-1, 0, SymMat::diag(d));
  prog.add_psd_coeff(0, 0, SymMat::identity(2));
  prog.set_rhs(0, 1.0);
  const SolveResult res = solve(prog);
  REQUIRE(certify(prog, res, 1e-6).ok, "clean point certifies");

  SolveResult bumped = res;
  for (double& v : bumped.z) v += 1e-3;
  REQUIRE(!certify(prog, bumped, 1e-6).ok,
          "a 1e-3 perturbation must break certification at 1e-6");

  SolveResult tiny = res;
  for (double& v : tiny.z) v += 1e-6;
  REQUIRE(certify(prog, tiny, 1e-4).ok,
          "a 1e-6 perturbation passes at tolerance 1e-4");
  REQUIRE(!certify(prog, tiny, 1e-10).ok,
          "a 1e-6 perturbation fails at tolerance 1e-10");
}

void validate_rejects() {
  ConicProgram prog;
  prog.psd_orders = {2};
  prog.init(1);
  prog.add_psd_coeff(0, 0, SymMat::identity(2));
  prog.set_rhs(0, 1.0);
  prog.c.clear();  // wrong length
  bool threw = false;
  try {
    prog.validate();
  } catch (const Error&) {
    threw = true;
  }
  REQUIRE(threw, "validate must reject inconsistent dimensions");
}

}  // namespace

int main() {
  svec_roundtrip();
  trivial_lp();
  small_sdp();
  mixed_cones();
  random_strict_instances();
  row_permutation_invariance();
  certify_thresholds();
  validate_rejects();
  std::cout << "unit_conic: all checks passed\n";
  return 0;
}
