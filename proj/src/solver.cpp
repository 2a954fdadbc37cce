#include "ramana/solver.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "ramana/kernels.hpp"

namespace ramana {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::NearOptimal: return "NearOptimal";
    case SolveStatus::NumericalTrouble: return "NumericalTrouble";
    case SolveStatus::Diverging: return "Diverging";
  }
  return "?";
}

double SolveResult::max_iterate_norm() const {
  double m = 0.0;
  for (const IterRecord& r : history)
    m = std::max({m, r.znorm, r.ynorm, r.snorm});
  return m;
}

namespace {

// Lower Cholesky; returns false if a pivot is not strictly positive.
bool cholesky(const SymMat& x, Mat& l) {
  const int n = x.order();
  l = Mat(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = x(i, j) - kernels::dot(l.row(i), l.row(j), j);
      if (i == j) {
        if (!(sum > 0.0)) return false;
        l(i, i) = std::sqrt(sum);
      } else {
        l(i, j) = sum / l(j, j);
      }
    }
  }
  return true;
}

// G = L^{-1} D L^{-T} for symmetric D, used for cone step lengths.
SymMat two_sided_solve(const Mat& l, const SymMat& d) {
  const int n = l.rows();
  Mat g0 = d.to_mat();
  // Forward substitution on each column: L g0 = D.
  for (int col = 0; col < n; ++col) {
    for (int i = 0; i < n; ++i) {
      double v = g0(i, col);
      for (int j = 0; j < i; ++j) v -= l(i, j) * g0(j, col);
      g0(i, col) = v / l(i, i);
    }
  }
  // Now solve G L^T = g0, i.e. L (G^T) = g0^T columnwise.
  Mat g0t = g0.transpose();
  for (int col = 0; col < n; ++col) {
    for (int i = 0; i < n; ++i) {
      double v = g0t(i, col);
      for (int j = 0; j < i; ++j) v -= l(i, j) * g0t(j, col);
      g0t(i, col) = v / l(i, i);
    }
  }
  const Mat g = g0t.transpose();
  SymMat out(n);
  for (int i = 0; i < n; ++i) {
    out.set(i, i, g(i, i));
    for (int j = 0; j < i; ++j) out.set(i, j, 0.5 * (g(i, j) + g(j, i)));
  }
  return out;
}

// Largest alpha in (0, 1] with X + alpha * D psd, scaled by frac.
// Returns -1 when X itself fails to factor.
double max_cone_step(const SymMat& x, const SymMat& d, double frac) {
  Mat l;
  if (!cholesky(x, l)) return -1.0;
  SymMat g = two_sided_solve(l, d);
  SpectralDecomposition sd = spectral(g);
  const double lmin = sd.eigenvalues.front();
  if (lmin >= 0.0) return 1.0;
  return std::min(1.0, -frac / lmin);
}

// Symmetric indefinite LDL^T with fixed signed regularization: the first
// p_plus pivots are clamped positive, the remaining ones negative. L is
// stored strictly below the diagonal, D on it.
bool ldlt_factor(Mat& k, int p_plus, double reg) {
  const int q = k.rows();
  Vec wk(q);
  for (int col = 0; col < q; ++col) {
    for (int j = 0; j < col; ++j) wk[j] = k(col, j) * k(j, j);
    double d = k(col, col) - kernels::dot(k.row(col), wk.data(), col);
    if (std::isnan(d)) return false;
    if (col < p_plus) {
      if (d < reg) d = reg;
    } else {
      if (d > -reg) d = -reg;
    }
    k(col, col) = d;
    for (int i = col + 1; i < q; ++i) {
      const double v = k(i, col) - kernels::dot(k.row(i), wk.data(), col);
      k(i, col) = v / d;
    }
  }
  return true;
}

void ldlt_solve(const Mat& f, Vec& x) {
  const int q = f.rows();
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < i; ++j) x[i] -= f(i, j) * x[j];
  for (int i = 0; i < q; ++i) x[i] /= f(i, i);
  for (int i = q - 1; i >= 0; --i)
    for (int j = i + 1; j < q; ++j) x[i] -= f(j, i) * x[j];
}

struct BlockWork {
  int order;
  int offset;  // into cone coordinates
  SymMat z, s;     // current iterates
  Mat h;           // W (x)_s W as an explicit svec-basis matrix
  SymMat w;        // NT scaling point
  SymMat s_inv;
  BlockWork(int ord, int off)
      : order(ord), offset(off), z(ord), s(ord), h(0, 0), w(ord), s_inv(ord) {}
};

// W with W S W = Z, both arguments positive definite; computed spectrally.
bool nt_scaling(const SymMat& z, const SymMat& s, SymMat& w, SymMat& s_inv) {
  const int n = z.order();
  SpectralDecomposition dz = spectral(z);
  if (dz.eigenvalues.front() <= 0.0) return false;
  Mat zh(n, n);   // Z^{1/2}
  for (int k = 0; k < n; ++k) {
    const double r = std::sqrt(dz.eigenvalues[k]);
    for (int i = 0; i < n; ++i) {
      const double q = dz.eigenvectors(i, k) * r;
      if (q == 0.0) continue;
      for (int j = 0; j < n; ++j) zh(i, j) += q * dz.eigenvectors(j, k);
    }
  }
  SymMat inner = congruence(zh, s);  // Z^{1/2} S Z^{1/2} (zh symmetric)
  SpectralDecomposition di = spectral(inner);
  if (di.eigenvalues.front() <= 0.0) return false;
  Mat ih(n, n);  // inner^{-1/2}
  for (int k = 0; k < n; ++k) {
    const double r = 1.0 / std::sqrt(di.eigenvalues[k]);
    for (int i = 0; i < n; ++i) {
      const double q = di.eigenvectors(i, k) * r;
      if (q == 0.0) continue;
      for (int j = 0; j < n; ++j) ih(i, j) += q * di.eigenvectors(j, k);
    }
  }
  const Mat wm = zh * ih * zh;
  w = SymMat::from_dense(wm, 1e-6);

  SpectralDecomposition ds = spectral(s);
  if (ds.eigenvalues.front() <= 0.0) return false;
  SymMat si(n);
  for (int k = 0; k < n; ++k) {
    const double r = 1.0 / ds.eigenvalues[k];
    for (int i = 0; i < n; ++i) {
      const double q = ds.eigenvectors(i, k) * r;
      if (q == 0.0) continue;
      for (int j = 0; j <= i; ++j) si.add(i, j, q * ds.eigenvectors(j, k));
    }
  }
  s_inv = si;
  return true;
}

// Explicit matrix of M -> W M W in the orthonormal svec basis.
Mat scaling_operator(const SymMat& w) {
  const int n = w.order();
  const int k = ConicProgram::svec_dim(n);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Mat h(k, k);
  // Column for basis element F_ij is svec(w_i w_j^T + w_j w_i^T), normalized.
  int col = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j, ++col) {
      SymMat m(n);
      if (i == j) {
        for (int a = 0; a < n; ++a)
          for (int b = 0; b <= a; ++b) m.set(a, b, w(a, i) * w(b, i));
      } else {
        for (int a = 0; a < n; ++a)
          for (int b = 0; b <= a; ++b)
            m.set(a, b,
                  inv_sqrt2 * (w(a, i) * w(b, j) + w(a, j) * w(b, i)));
      }
      const Vec sv = svec(m);
      for (int r = 0; r < k; ++r) h(r, col) = sv[r];
    }
  }
  return h;
}

struct Workspace {
  int p = 0;             // equality rows
  int nc = 0;            // cone coordinates
  int nu = 0;            // sum of block orders + nonneg count (barrier degree)
  std::vector<BlockWork> blocks;
  int q_nonneg = 0;
  std::vector<int> active_free;  // free columns kept in the KKT system
  Mat ac, act, af;       // cone columns, their transpose, active free columns
  Vec cc, cf;            // objective on cone / active free coordinates
};

}  // namespace

SolveResult solve(const ConicProgram& prog, const SolverOptions& opts) {
  prog.validate();
  const int p = prog.rows();
  if (p < 1) throw DimensionError("conic program needs at least one row");

  // Presolve on rows. Modified Gram-Schmidt over the rows of A, carrying b
  // through the same projections, detects exact linear dependence, which
  // would make the Schur complement singular. A dependent row whose
  // right-hand side matches the combination is redundant and dropped; one
  // that does not match certifies infeasibility. Independent rows far from
  // unit norm would skew the KKT system between the y and z spaces enough to
  // strangle the step lengths, so in that case the kept rows are also
  // equilibrated. Either way the cleaned program is solved recursively (it
  // passes straight through here) and y is mapped back: zeros complete the
  // dual on dropped rows and kept entries are unscaled, leaving A^T y and
  // b^T y unchanged.
  {
    const int n_all = prog.dim();
    const double bmax = norm_inf(prog.b);
    std::vector<Vec> basis;        // orthonormal spans of kept rows
    Vec basis_rhs;                 // b carried through the same projections
    std::vector<int> kept, dropped;
    Vec kept_norm;
    bool skewed = false;
    for (int i = 0; i < p; ++i) {
      Vec v(n_all);
      for (int j = 0; j < n_all; ++j) v[j] = prog.A(i, j);
      double beta = prog.b[i];
      const double rownorm = std::sqrt(dot(v, v));
      for (std::size_t k = 0; k < basis.size(); ++k) {
        const double d = dot(v, basis[k]);
        for (int j = 0; j < n_all; ++j) v[j] -= d * basis[k][j];
        beta -= d * basis_rhs[k];
      }
      const double resid = std::sqrt(dot(v, v));
      if (resid > 1e-12 * std::max(1.0, rownorm)) {
        for (int j = 0; j < n_all; ++j) v[j] /= resid;
        basis.push_back(std::move(v));
        basis_rhs.push_back(beta / resid);
        kept.push_back(i);
        kept_norm.push_back(rownorm);
        if (rownorm < 0.1 || rownorm > 10.0) skewed = true;
      } else if (std::abs(beta) > 1e-8 * (1.0 + bmax)) {
        SolveResult res;
        res.status = SolveStatus::Diverging;
        res.message = "equality row " + std::to_string(i) +
                      " is a linear combination of earlier rows with a "
                      "mismatched right-hand side; the program is infeasible";
        res.z.assign(prog.dim(), 0.0);
        res.y.assign(p, 0.0);
        res.s.assign(prog.dim(), 0.0);
        return res;
      } else {
        dropped.push_back(i);
      }
    }
    if ((!dropped.empty() || skewed) && !kept.empty()) {
      ConicProgram reduced = prog;
      const int pr = static_cast<int>(kept.size());
      reduced.A = Mat(pr, n_all);
      reduced.b.assign(pr, 0.0);
      for (int i = 0; i < pr; ++i) {
        for (int j = 0; j < n_all; ++j)
          reduced.A(i, j) = prog.A(kept[i], j) / kept_norm[i];
        reduced.b[i] = prog.b[kept[i]] / kept_norm[i];
      }
      SolveResult res = solve(reduced, opts);
      Vec y_full(p, 0.0);
      for (int i = 0; i < pr; ++i) y_full[kept[i]] = res.y[i] / kept_norm[i];
      res.y = std::move(y_full);
      if (!res.z.empty()) {
        // Honest feasibility against the full row set.
        const Vec az = prog.A.apply(res.z);
        double pe = 0.0;
        for (int i = 0; i < p; ++i)
          pe = std::max(pe, std::abs(az[i] - prog.b[i]));
        res.pinf = pe / (1.0 + bmax);
      }
      return res;
    }
  }

  Workspace ws;
  ws.p = p;
  ws.nc = prog.cone_dim();
  ws.q_nonneg = prog.nonneg;
  int off = 0;
  for (std::size_t b = 0; b < prog.psd_orders.size(); ++b) {
    ws.blocks.emplace_back(prog.psd_orders[b], off);
    off += ConicProgram::svec_dim(prog.psd_orders[b]);
    ws.nu += prog.psd_orders[b];
  }
  ws.nu += prog.nonneg;

  SolveResult res;

  // Presolve on free columns: a column of zeros pins the variable; a pinned
  // variable with a nonzero objective coefficient is a certificate of dual
  // infeasibility (the objective is unbounded along that coordinate).
  const int f_all = prog.free_vars;
  const int foff = prog.free_offset();
  for (int j = 0; j < f_all; ++j) {
    double colmax = 0.0;
    for (int i = 0; i < p; ++i)
      colmax = std::max(colmax, std::abs(prog.A(i, foff + j)));
    if (colmax > 0.0) {
      ws.active_free.push_back(j);
    } else if (std::abs(prog.c[foff + j]) > 0.0) {
      res.status = SolveStatus::Diverging;
      res.message = "free variable " + std::to_string(j) +
                    " has an empty column and a nonzero objective "
                    "coefficient; the objective is unbounded along it";
      res.z.assign(prog.dim(), 0.0);
      res.y.assign(p, 0.0);
      res.s.assign(prog.dim(), 0.0);
      return res;
    }
  }
  const int fa = static_cast<int>(ws.active_free.size());

  ws.ac = Mat(p, ws.nc);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < ws.nc; ++j) ws.ac(i, j) = prog.A(i, j);
  ws.act = ws.ac.transpose();
  ws.af = Mat(p, fa);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < fa; ++j) ws.af(i, j) = prog.A(i, foff + ws.active_free[j]);
  ws.cc.assign(prog.c.begin(), prog.c.begin() + ws.nc);
  ws.cf.resize(fa);
  for (int j = 0; j < fa; ++j) ws.cf[j] = prog.c[foff + ws.active_free[j]];

  const double bnorm = norm_inf(prog.b);
  const double cnorm = norm_inf(prog.c);

  // Pure linear case: no cone coordinates, a single symmetric solve.
  if (ws.nc == 0) {
    const int q = p + fa;
    Mat kkt(q, q);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < fa; ++j) {
        kkt(i, p + j) = ws.af(i, j);
        kkt(p + j, i) = ws.af(i, j);
      }
    Mat fac = kkt;
    Vec rhs(q, 0.0);
    for (int i = 0; i < p; ++i) rhs[i] = prog.b[i];
    for (int j = 0; j < fa; ++j) rhs[p + j] = ws.cf[j];
    res.z.assign(prog.dim(), 0.0);
    res.y.assign(p, 0.0);
    res.s.assign(prog.dim(), 0.0);
    if (!ldlt_factor(fac, p, 1e-12)) {
      res.status = SolveStatus::NumericalTrouble;
      res.message = "linear subproblem factorization failed";
      return res;
    }
    Vec sol = rhs;
    ldlt_solve(fac, sol);
    for (int i = 0; i < p; ++i) res.y[i] = sol[i];
    for (int j = 0; j < fa; ++j) res.z[foff + ws.active_free[j]] = sol[p + j];
    Vec az = prog.A.apply(res.z);
    Vec aty = prog.A.apply_transpose(res.y);
    double pe = 0.0, de = 0.0;
    for (int i = 0; i < p; ++i) pe = std::max(pe, std::abs(az[i] - prog.b[i]));
    for (int j = 0; j < prog.dim(); ++j)
      de = std::max(de, std::abs(prog.c[j] - aty[j]));
    res.primal_value = dot(prog.c, res.z);
    res.dual_value = dot(prog.b, res.y);
    res.gap_abs = std::abs(res.primal_value - res.dual_value);
    res.pinf = pe / (1.0 + bnorm);
    res.dinf = de / (1.0 + cnorm);
    if (res.pinf <= opts.feas_tol * 10 && res.dinf <= opts.feas_tol * 10) {
      res.status = SolveStatus::Optimal;
    } else {
      res.status = SolveStatus::Diverging;
      res.message = "linear subproblem is infeasible or unbounded";
    }
    return res;
  }

  // Interior start: identity-scaled cone points.
  const double z0 = std::max(1.0, bnorm);
  const double s0 = std::max(1.0, cnorm);
  Vec z(prog.dim(), 0.0), y(p, 0.0), s(prog.dim(), 0.0);
  for (BlockWork& bw : ws.blocks) {
    bw.z = SymMat::identity(bw.order).scaled(z0);
    bw.s = SymMat::identity(bw.order).scaled(s0);
  }
  Vec zq(ws.q_nonneg, z0), sq(ws.q_nonneg, s0);

  auto pack = [&] {
    for (const BlockWork& bw : ws.blocks) {
      const Vec sv = svec(bw.z), ss = svec(bw.s);
      for (std::size_t k = 0; k < sv.size(); ++k) {
        z[bw.offset + k] = sv[k];
        s[bw.offset + k] = ss[k];
      }
    }
    const int qoff = prog.nonneg_offset();
    for (int i = 0; i < ws.q_nonneg; ++i) {
      z[qoff + i] = zq[i];
      s[qoff + i] = sq[i];
    }
  };
  pack();

  const int q = p + fa;
  Mat kkt(q, q), fac(q, q);
  Vec rhs(q), sol(q), resid(q);
  Vec rp(p), rd(prog.dim());
  Vec rmu(ws.nc);
  Vec dz(prog.dim()), dy(p), ds(prog.dim());

  std::vector<double> relgap_hist;
  std::string fail_message;
  bool trouble = false, diverging = false;
  // Neighborhood coupling of feasibility and complementarity, set from the
  // first iterate: residuals may lag mu by at most 1e2 times their initial
  // ratio. Zero disables the safeguard (feasible start).
  double res_scale = 0.0;

  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    // Residuals and progress measures.
    Vec az = prog.A.apply(z);
    for (int i = 0; i < p; ++i) rp[i] = prog.b[i] - az[i];
    Vec aty = prog.A.apply_transpose(y);
    for (int j = 0; j < prog.dim(); ++j) rd[j] = prog.c[j] - aty[j] - s[j];
    // Pinned free columns carry no dual equation.
    for (int j = 0; j < f_all; ++j) {
      bool active = false;
      for (int a : ws.active_free)
        if (a == j) { active = true; break; }
      if (!active) rd[foff + j] = 0.0;
    }
    double mu = 0.0;
    for (const BlockWork& bw : ws.blocks) mu += inner_product(bw.z, bw.s);
    for (int i = 0; i < ws.q_nonneg; ++i) mu += zq[i] * sq[i];
    mu /= ws.nu;
    const double pobj = dot(prog.c, z);
    const double dobj = dot(prog.b, y);
    const double relgap =
        std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double pinf = norm_inf(rp) / (1.0 + bnorm);
    const double dinf = norm_inf(rd) / (1.0 + cnorm);

    if (iter == 0 && pinf + dinf > opts.feas_tol)
      res_scale = 1e2 * (pinf + dinf) / mu;

    IterRecord rec;
    rec.iter = iter;
    rec.mu = mu;
    rec.rel_gap = relgap;
    rec.pinf = pinf;
    rec.dinf = dinf;
    rec.znorm = norm_inf(z);
    rec.ynorm = norm_inf(y);
    rec.snorm = norm_inf(s);
    rec.alpha_p = 0.0;
    rec.alpha_d = 0.0;
    res.history.push_back(rec);
    relgap_hist.push_back(relgap);

    if (opts.verbose) {
      std::cerr << "iter " << iter << " mu " << mu << " gap " << relgap
                << " pinf " << pinf << " dinf " << dinf << "\n";
    }

    if (pinf <= opts.feas_tol && dinf <= opts.feas_tol &&
        (relgap <= opts.gap_tol || mu <= opts.gap_tol)) {
      res.status = SolveStatus::Optimal;
      break;
    }
    // Gap closed but a residual stuck within 100x of tolerance: the iterate
    // is pinned against a face with no interior behind it, and further
    // centering only erodes the scaling. Stop while the numbers are good.
    if (pinf <= 100 * opts.feas_tol && dinf <= 100 * opts.feas_tol &&
        (relgap <= opts.gap_tol || mu <= opts.gap_tol)) {
      res.status = SolveStatus::NearOptimal;
      res.message = "gap closed with feasibility within 100x tolerance";
      break;
    }
    if (std::max({rec.znorm, rec.ynorm, rec.snorm}) > 1e13) {
      diverging = true;
      fail_message = "iterate norms exceeded 1e13";
      break;
    }
    // Stalled: residuals essentially feasible, gap no longer improving.
    if (iter >= 30 && pinf <= 1e-6 && dinf <= 1e-6) {
      const double old = relgap_hist[iter - 10];
      if (relgap > opts.gap_tol && relgap > 0.95 * old) {
        res.status = SolveStatus::NearOptimal;
        res.message = "progress stalled with small residuals";
        break;
      }
    }

    // NT scaling and the explicit scaled operators.
    bool scale_ok = true;
    for (BlockWork& bw : ws.blocks) {
      if (!nt_scaling(bw.z, bw.s, bw.w, bw.s_inv)) {
        scale_ok = false;
        break;
      }
      bw.h = scaling_operator(bw.w);
    }
    if (!scale_ok) {
      trouble = true;
      fail_message = "iterate left the cone (scaling failure)";
      break;
    }

    // Schur complement M = Ac H Ac^T and the bordered KKT matrix.
    Mat g(p, ws.nc);
    for (const BlockWork& bw : ws.blocks) {
      const int k = ConicProgram::svec_dim(bw.order);
      Mat asub(p, k);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < k; ++j) asub(i, j) = ws.ac(i, bw.offset + j);
      const Mat gsub = asub * bw.h;
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < k; ++j) g(i, bw.offset + j) = gsub(i, j);
    }
    const int qoff_cone = prog.nonneg_offset();
    for (int i = 0; i < p; ++i)
      for (int t = 0; t < ws.q_nonneg; ++t)
        g(i, qoff_cone + t) = ws.ac(i, qoff_cone + t) * (zq[t] / sq[t]);
    const Mat m = g * ws.act;
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) kkt(i, j) = m(i, j);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < fa; ++j) {
        kkt(i, p + j) = ws.af(i, j);
        kkt(p + j, i) = ws.af(i, j);
      }
    for (int i = 0; i < fa; ++i)
      for (int j = 0; j < fa; ++j) kkt(p + i, p + j) = 0.0;

    double diag_scale = 1.0;
    for (int i = 0; i < p; ++i) diag_scale = std::max(diag_scale, kkt(i, i));
    fac = kkt;
    if (!ldlt_factor(fac, p, 1e-13 * diag_scale)) {
      trouble = true;
      fail_message = "KKT factorization failed";
      break;
    }

    auto build_rhs_and_solve = [&](double sigma_val) -> bool {
      // Centrality right-hand side per cone coordinate.
      for (const BlockWork& bw : ws.blocks) {
        SymMat rc = bw.s_inv.scaled(sigma_val * mu) - bw.z;
        const Vec sv = svec(rc);
        for (std::size_t k = 0; k < sv.size(); ++k) rmu[bw.offset + k] = sv[k];
      }
      for (int t = 0; t < ws.q_nonneg; ++t)
        rmu[qoff_cone + t] = sigma_val * mu / sq[t] - zq[t];

      // g1 = rp - Ac (rmu - H rdc); rdc is the cone part of rd.
      Vec hrd(ws.nc, 0.0);
      for (const BlockWork& bw : ws.blocks) {
        const int k = ConicProgram::svec_dim(bw.order);
        Vec loc(k);
        for (int t = 0; t < k; ++t) loc[t] = rd[bw.offset + t];
        Vec out(k, 0.0);
        for (int r = 0; r < k; ++r)
          out[r] = kernels::dot(bw.h.row(r), loc.data(), k);
        for (int t = 0; t < k; ++t) hrd[bw.offset + t] = out[t];
      }
      for (int t = 0; t < ws.q_nonneg; ++t)
        hrd[qoff_cone + t] = (zq[t] / sq[t]) * rd[qoff_cone + t];

      Vec tmp(ws.nc);
      for (int t = 0; t < ws.nc; ++t) tmp[t] = rmu[t] - hrd[t];
      for (int i = 0; i < p; ++i)
        rhs[i] = rp[i] - kernels::dot(ws.ac.row(i), tmp.data(), ws.nc);
      for (int j = 0; j < fa; ++j)
        rhs[p + j] = rd[foff + ws.active_free[j]];

      sol = rhs;
      ldlt_solve(fac, sol);
      // One round of iterative refinement against the unregularized system.
      for (int i = 0; i < q; ++i)
        resid[i] = rhs[i] - kernels::dot(kkt.row(i), sol.data(), q);
      Vec corr = resid;
      ldlt_solve(fac, corr);
      for (int i = 0; i < q; ++i) sol[i] += corr[i];

      // Recover directions.
      for (int i = 0; i < p; ++i) dy[i] = sol[i];
      std::fill(dz.begin(), dz.end(), 0.0);
      std::fill(ds.begin(), ds.end(), 0.0);
      Vec atdy = ws.act.apply(dy);  // Ac^T dy, length nc
      for (int t = 0; t < ws.nc; ++t) ds[t] = rd[t] - atdy[t];
      // dz_c = rmu - H ds_c
      for (const BlockWork& bw : ws.blocks) {
        const int k = ConicProgram::svec_dim(bw.order);
        Vec loc(k);
        for (int t = 0; t < k; ++t) loc[t] = ds[bw.offset + t];
        for (int r = 0; r < k; ++r)
          dz[bw.offset + r] =
              rmu[bw.offset + r] - kernels::dot(bw.h.row(r), loc.data(), k);
      }
      for (int t = 0; t < ws.q_nonneg; ++t)
        dz[qoff_cone + t] =
            rmu[qoff_cone + t] - (zq[t] / sq[t]) * ds[qoff_cone + t];
      for (int j = 0; j < fa; ++j) dz[foff + ws.active_free[j]] = sol[p + j];
      for (double v : sol)
        if (std::isnan(v)) return false;
      return true;
    };

    auto step_lengths = [&](double& ap, double& ad) -> bool {
      ap = 1.0;
      ad = 1.0;
      for (const BlockWork& bw : ws.blocks) {
        const int k = ConicProgram::svec_dim(bw.order);
        Vec lz(k), ls(k);
        for (int t = 0; t < k; ++t) {
          lz[t] = dz[bw.offset + t];
          ls[t] = ds[bw.offset + t];
        }
        const double az_blk =
            max_cone_step(bw.z, smat(lz, bw.order), opts.step_frac);
        const double as_blk =
            max_cone_step(bw.s, smat(ls, bw.order), opts.step_frac);
        if (az_blk < 0.0 || as_blk < 0.0) return false;
        ap = std::min(ap, az_blk);
        ad = std::min(ad, as_blk);
      }
      for (int t = 0; t < ws.q_nonneg; ++t) {
        const double dzt = dz[qoff_cone + t], dst = ds[qoff_cone + t];
        if (dzt < 0.0) ap = std::min(ap, -opts.step_frac * zq[t] / dzt);
        if (dst < 0.0) ad = std::min(ad, -opts.step_frac * sq[t] / dst);
      }
      return true;
    };

    double sigma = opts.sigma;
    if (opts.adaptive_centering) {
      if (!build_rhs_and_solve(0.0)) {
        trouble = true;
        fail_message = "affine probe produced NaN";
        break;
      }
      double ap_aff, ad_aff;
      if (!step_lengths(ap_aff, ad_aff)) {
        trouble = true;
        fail_message = "iterate left the cone during the affine probe";
        break;
      }
      // Estimate the complementarity after the affine step.
      double mu_aff = 0.0;
      {
        Vec z_try = z, s_try = s;
        axpy_into(ap_aff, dz, z_try);
        axpy_into(ad_aff, ds, s_try);
        for (const BlockWork& bw : ws.blocks) {
          const int k = ConicProgram::svec_dim(bw.order);
          Vec a(k), bvec(k);
          for (int t = 0; t < k; ++t) {
            a[t] = z_try[bw.offset + t];
            bvec[t] = s_try[bw.offset + t];
          }
          mu_aff += kernels::dot(a.data(), bvec.data(), k);
        }
        for (int t = 0; t < ws.q_nonneg; ++t)
          mu_aff += z_try[qoff_cone + t] * s_try[qoff_cone + t];
        mu_aff /= ws.nu;
      }
      const double ratio = std::max(0.0, mu_aff / mu);
      sigma = std::min(0.8, std::max(1e-4, ratio * ratio * ratio));
    }

    if (!build_rhs_and_solve(sigma)) {
      trouble = true;
      fail_message = "search direction produced NaN";
      break;
    }
    double ap, ad;
    if (!step_lengths(ap, ad)) {
      trouble = true;
      fail_message = "step length computation failed (iterate left the cone)";
      break;
    }
    // Equal steps on both sides. The residual rows are linear in the step,
    // so r+ = (1 - alpha) r, while complementarity is quadratic in it; on a
    // program whose dual has an empty interior a full step can collapse
    // <z,s> against a still-unconverged residual and jam the iterate into a
    // boundary corner. Backtrack until mu keeps pace with feasibility.
    double alpha = std::min(ap, ad);
    if (res_scale > 0.0) {
      const double res_now = pinf + dinf;
      double t1 = 0.0, t2 = 0.0;
      for (int t = 0; t < ws.nc; ++t) {
        t1 += z[t] * ds[t] + dz[t] * s[t];
        t2 += dz[t] * ds[t];
      }
      for (int bt = 0; bt < 80; ++bt) {
        if ((1.0 - alpha) * res_now <= opts.feas_tol) break;
        const double mu_try =
            (mu * ws.nu + alpha * t1 + alpha * alpha * t2) / ws.nu;
        if (mu_try > 0.0 && mu_try * res_scale >= (1.0 - alpha) * res_now)
          break;
        alpha *= 0.7;
      }
    }
    // Never commit a step that leaves the cone: the spectral step bound can
    // overshoot on ill-conditioned blocks, which would kill the next scaling.
    auto cone_ok = [&](double a) -> bool {
      Mat ltmp;
      for (const BlockWork& bw : ws.blocks) {
        const int k = ConicProgram::svec_dim(bw.order);
        Vec lz(k), ls(k);
        for (int t = 0; t < k; ++t) {
          lz[t] = z[bw.offset + t] + a * dz[bw.offset + t];
          ls[t] = s[bw.offset + t] + a * ds[bw.offset + t];
        }
        if (!cholesky(smat(lz, bw.order), ltmp)) return false;
        if (!cholesky(smat(ls, bw.order), ltmp)) return false;
      }
      for (int t = 0; t < ws.q_nonneg; ++t) {
        if (zq[t] + a * dz[qoff_cone + t] <= 0.0) return false;
        if (sq[t] + a * ds[qoff_cone + t] <= 0.0) return false;
      }
      return true;
    };
    for (int bt = 0; bt < 40 && !cone_ok(alpha); ++bt) alpha *= 0.5;

    if (alpha < 1e-10) {
      trouble = true;
      fail_message = "step lengths collapsed";
      break;
    }

    axpy_into(alpha, dz, z);
    axpy_into(alpha, dy, y);
    for (int t = 0; t < ws.nc; ++t) s[t] += alpha * ds[t];
    // Refresh the block views from the packed iterate.
    for (BlockWork& bw : ws.blocks) {
      const int k = ConicProgram::svec_dim(bw.order);
      Vec lz(k), ls(k);
      for (int t = 0; t < k; ++t) {
        lz[t] = z[bw.offset + t];
        ls[t] = s[bw.offset + t];
      }
      bw.z = smat(lz, bw.order);
      bw.s = smat(ls, bw.order);
    }
    for (int t = 0; t < ws.q_nonneg; ++t) {
      zq[t] = z[qoff_cone + t];
      sq[t] = s[qoff_cone + t];
    }
    res.history.back().alpha_p = alpha;
    res.history.back().alpha_d = alpha;
  }

  res.z = z;
  res.y = y;
  res.s = s;
  res.iterations = iter;
  res.primal_value = dot(prog.c, z);
  res.dual_value = dot(prog.b, y);
  res.gap_abs = std::abs(res.primal_value - res.dual_value);
  if (!res.history.empty()) {
    res.pinf = res.history.back().pinf;
    res.dinf = res.history.back().dinf;
  }

  if (res.status == SolveStatus::Optimal ||
      (res.status == SolveStatus::NearOptimal && !trouble && !diverging)) {
    return res;
  }
  if (diverging) {
    res.status = SolveStatus::Diverging;
    res.message = fail_message;
    return res;
  }
  if (trouble) {
    // Numerical failure after the metrics already converged reads as a
    // boundary-pinned solution, not a failed run.
    if (!relgap_hist.empty() && relgap_hist.back() <= 10 * opts.gap_tol &&
        res.pinf <= 100 * opts.feas_tol && res.dinf <= 100 * opts.feas_tol) {
      res.status = SolveStatus::NearOptimal;
      res.message = fail_message + " after the gap closed";
      return res;
    }
    // A blown-up but feasible trajectory reads as divergence toward an
    // unattained optimum rather than as a plain numerical failure.
    if (res.max_iterate_norm() > 1e8 && res.pinf <= 1e-6) {
      res.status = SolveStatus::Diverging;
      res.message = fail_message + " at extreme iterate norms";
    } else {
      res.status = SolveStatus::NumericalTrouble;
      res.message = fail_message;
    }
    return res;
  }
  // Iteration cap reached.
  if (res.pinf <= 1e-6 && res.dinf <= 1e-6) {
    res.status = SolveStatus::NearOptimal;
    res.message = "iteration cap reached with small residuals";
  } else {
    res.status = SolveStatus::NumericalTrouble;
    res.message = "iteration cap reached without feasibility";
  }
  return res;
}

CertifyReport certify(const ConicProgram& prog, const SolveResult& r,
                      double tol) {
  CertifyReport rep{};
  const Vec az = prog.A.apply(r.z);
  double pe = 0.0;
  for (int i = 0; i < prog.rows(); ++i)
    pe = std::max(pe, std::abs(az[i] - prog.b[i]));
  rep.primal_eq_residual = pe;

  double pcone = 0.0;
  for (std::size_t bidx = 0; bidx < prog.psd_orders.size(); ++bidx) {
    const SymMat zb = prog.psd_block_of(r.z, bidx);
    PsdResult pr = psd_check(zb, tol);
    pcone = std::max(pcone, std::max(0.0, -pr.lambda_min));
  }
  for (int t = 0; t < prog.nonneg; ++t)
    pcone = std::max(pcone, std::max(0.0, -r.z[prog.nonneg_offset() + t]));
  rep.primal_cone_violation = pcone;

  const Vec aty = prog.A.apply_transpose(r.y);
  double de = 0.0;
  for (int j = 0; j < prog.cone_dim(); ++j)
    de = std::max(de, std::abs(prog.c[j] - aty[j] - r.s[j]));
  for (int j = prog.cone_dim(); j < prog.dim(); ++j) {
    const bool pinned = [&] {
      double colmax = 0.0;
      for (int i = 0; i < prog.rows(); ++i)
        colmax = std::max(colmax, std::abs(prog.A(i, j)));
      return colmax == 0.0 && std::abs(prog.c[j]) == 0.0;
    }();
    if (!pinned) de = std::max(de, std::abs(prog.c[j] - aty[j]));
  }
  rep.dual_eq_residual = de;

  double dcone = 0.0;
  for (std::size_t bidx = 0; bidx < prog.psd_orders.size(); ++bidx) {
    const SymMat sb = prog.psd_block_of(r.s, bidx);
    PsdResult pr = psd_check(sb, tol);
    dcone = std::max(dcone, std::max(0.0, -pr.lambda_min));
  }
  for (int t = 0; t < prog.nonneg; ++t)
    dcone = std::max(dcone, std::max(0.0, -r.s[prog.nonneg_offset() + t]));
  rep.dual_cone_violation = dcone;

  double fs = 0.0;
  for (int j = prog.cone_dim(); j < prog.dim(); ++j)
    fs = std::max(fs, std::abs(r.s[j]));
  rep.free_slack_abs = fs;

  rep.gap_abs = std::abs(dot(prog.c, r.z) - dot(prog.b, r.y));
  const double bscale = 1.0 + norm_inf(prog.b);
  const double cscale = 1.0 + norm_inf(prog.c);
  const double vscale =
      1.0 + std::abs(dot(prog.c, r.z)) + std::abs(dot(prog.b, r.y));
  rep.ok = pe <= tol * bscale && de <= tol * cscale &&
           pcone <= tol * bscale && dcone <= tol * cscale &&
           fs <= tol * cscale && rep.gap_abs <= tol * vscale;
  return rep;
}

}  // namespace ramana
