#include "ramana/facial.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "ramana/kernels.hpp"

namespace ramana {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

// Entries (a,b), a <= b, with a column index past the face block. Shared by
// the pair builder and the certificate unpacker so the ordering agrees.
std::vector<std::pair<int, int>> outside_entries(int n, int s) {
  std::vector<std::pair<int, int>> out;
  for (int b = s; b < n; ++b)
    for (int a = 0; a <= b; ++a) out.emplace_back(a, b);
  return out;
}

// Gauss-Newton refinement of a reducing certificate. The interior-point
// minimizer carries O(sqrt(mu)) noise when strict complementarity fails;
// writing the face block as a rank-r factor V V^T and keeping the outside
// entries as linear unknowns turns the certificate equations
//   <A_i, Y> = 0,  <B, Y> = 0,  tr Y(1:s) = 1
// into a small least-squares system whose minimum-norm Newton steps converge
// quadratically from the solver's point. Returns the refined certificate, or
// nothing when the residual will not drop (wrong rank, irregular point).
std::optional<SymMat> polish_certificate(const SdpInstance& inst, int s, int r,
                                         const SymMat& y) {
  const int n = inst.n, m = inst.m;
  const auto entries = outside_entries(n, s);
  const int f = static_cast<int>(entries.size());
  const int nv = s * r + f;
  const int ne = m + 2;

  // Factor initializer from the top-r eigenpairs of the face block.
  const SpectralDecomposition sd = spectral(principal_submatrix(y, 1, s));
  Mat v(s, r);
  for (int j = 0; j < r; ++j) {
    const double sc = std::sqrt(std::max(sd.eigenvalues[s - 1 - j], 0.0));
    for (int i = 0; i < s; ++i) v(i, j) = sd.eigenvectors(i, s - 1 - j) * sc;
  }
  Vec fr(f);
  for (int t = 0; t < f; ++t) fr[t] = y(entries[t].first, entries[t].second);

  auto assemble = [&] {
    SymMat out(n);
    for (int i = 0; i < s; ++i)
      for (int j = i; j < s; ++j)
        out.set(i, j, kernels::dot(v.row(i), v.row(j), r));
    for (int t = 0; t < f; ++t)
      out.set(entries[t].first, entries[t].second, fr[t]);
    return out;
  };

  double scale = 1.0 + inst.B.max_abs();
  for (const SymMat& a : inst.A) scale = std::max(scale, 1.0 + a.max_abs());

  Vec rvec(ne);
  auto refresh = [&](const SymMat& cand) {
    for (int i = 0; i < m; ++i) rvec[i] = inner_product(inst.A[i], cand);
    rvec[m] = inner_product(inst.B, cand);
    double tr = 0.0;
    for (int i = 0; i < s; ++i) tr += cand(i, i);
    rvec[m + 1] = tr - 1.0;
  };

  SymMat cand = assemble();
  refresh(cand);
  for (int it = 0; it < 25 && norm_inf(rvec) > 1e-14 * scale; ++it) {
    Mat jac(ne, nv);
    for (int row = 0; row < ne; ++row) {
      if (row < m + 1) {
        const SymMat& g = row < m ? inst.A[row] : inst.B;
        const Mat gv = principal_submatrix(g, 1, s).to_mat() * v;
        for (int i = 0; i < s; ++i)
          for (int k = 0; k < r; ++k) jac(row, i * r + k) = 2.0 * gv(i, k);
        for (int t = 0; t < f; ++t) {
          const auto [a, b] = entries[t];
          jac(row, s * r + t) = (a == b ? 1.0 : 2.0) * g(a, b);
        }
      } else {
        for (int i = 0; i < s; ++i)
          for (int k = 0; k < r; ++k) jac(row, i * r + k) = 2.0 * v(i, k);
      }
    }
    // Minimum-norm step: delta = -J^T (J J^T)^+ r.
    SymMat jjt(ne);
    for (int a = 0; a < ne; ++a)
      for (int b = 0; b <= a; ++b)
        jjt.set(a, b, kernels::dot(jac.row(a), jac.row(b), nv));
    const Vec w = pseudo_inverse(jjt, 1e-13).to_mat().apply(rvec);
    for (int i = 0; i < s; ++i)
      for (int k = 0; k < r; ++k) {
        double acc = 0.0;
        for (int row = 0; row < ne; ++row) acc += jac(row, i * r + k) * w[row];
        v(i, k) -= acc;
      }
    for (int t = 0; t < f; ++t) {
      double acc = 0.0;
      for (int row = 0; row < ne; ++row) acc += jac(row, s * r + t) * w[row];
      fr[t] -= acc;
    }
    cand = assemble();
    refresh(cand);
  }
  if (norm_inf(rvec) > 1e-12 * scale) return std::nullopt;
  return cand;
}

// Rank of the certificate mass of a raw minimizer. Eigenvalues below the
// complementarity noise of the backing solve (O(sqrt(mu))) cannot be
// certified as certificate mass: Gauss-Newton from them converges onto
// boundary artifacts whose equations hold to eps while the entries sit
// sqrt(eps) away from any true certificate. Underestimating the rank is
// safe -- the next round of the reduction loop picks up the remainder --
// so the floor errs high.
int certified_rank(const SymMat& face, double noise, double eps_rank) {
  const SpectralDecomposition sd = spectral(face);
  const double lmax = std::max(sd.eigenvalues.back(), 0.0);
  const double cut = std::max(eps_rank, noise) * std::max(1.0, lmax);
  int r = 0;
  for (double lv : sd.eigenvalues)
    if (lv > cut) ++r;
  return r;
}

}  // namespace

GordanOutcome gordan_pair(const SdpInstance& inst, int s,
                          const FacialOptions& opts) {
  if (s < 1 || s > inst.n)
    throw DimensionError("gordan_pair: face order must lie in 1..n");
  const int n = inst.n, m = inst.m;
  const auto entries = outside_entries(n, s);

  // The margin variable of the (sup) side is capped at 1, which adds the
  // nonneg slack u to the trace row and the objective. Without the cap a
  // face whose slack margin is unbounded leaves the (inf) side infeasible
  // and the solve diverges; with it both sides stay solvable -- the (sup)
  // side even strictly, from a deeply negative margin -- and the value
  // min(margin, 1) classifies exactly as before.
  ConicProgram prog;
  prog.psd_orders = {s};
  prog.psd_names = {"face"};
  prog.nonneg = 1;
  prog.free_vars = static_cast<int>(entries.size());
  prog.init(m + 1);

  auto load = [&](int row, const SymMat& g) {
    prog.add_psd_coeff(row, 0, principal_submatrix(g, 1, s));
    for (int t = 0; t < static_cast<int>(entries.size()); ++t) {
      const auto [a, b] = entries[t];
      const double v = g(a, b);
      if (v != 0.0) prog.add_free_coeff(row, t, a == b ? v : 2.0 * v);
    }
  };
  for (int i = 0; i < m; ++i) {
    load(i, inst.A[i]);
    prog.set_rhs(i, 0.0);
  }
  prog.add_psd_coeff(m, 0, SymMat::identity(s));
  prog.add_nonneg_coeff(m, 0, 1.0);
  prog.set_rhs(m, 1.0);
  load(-1, inst.B);
  prog.add_nonneg_coeff(-1, 0, 1.0);

  SolveResult res = solve(prog, opts.solver);
  if (res.status != SolveStatus::Optimal &&
      res.status != SolveStatus::NearOptimal)
    throw ConvergenceError("alternative pair at face order " +
                           std::to_string(s) + " ended " +
                           std::string(to_string(res.status)) + ": " +
                           res.message);
  const double lo = std::min(res.primal_value, res.dual_value);
  const double hi = std::max(res.primal_value, res.dual_value);
  const double thr = opts.tol.tol_fr;
  if (opts.verbose)
    std::cerr << "[facial] order " << s << ": pair value in [" << fmt(lo)
              << ", " << fmt(hi) << "]\n";

  if (lo > thr) {
    GordanPositive pos;
    pos.t = res.y[m];
    pos.x.assign(res.y.begin(), res.y.begin() + m);
    return pos;
  }
  if (hi <= thr) {
    SymMat y(n);
    const SymMat face = prog.psd_block_of(res.z, 0);
    for (int i = 0; i < s; ++i)
      for (int j = i; j < s; ++j) y.set(i, j, face(i, j));
    for (int t = 0; t < static_cast<int>(entries.size()); ++t)
      y.set(entries[t].first, entries[t].second,
            res.z[prog.free_offset() + t]);
    // Refine the minimizer before handing it on: its entries are only
    // sqrt(mu)-accurate, which is too coarse for the downstream rank split
    // and rotation.
    const double mu_fin =
        res.history.empty() ? std::abs(hi) : res.history.back().mu;
    const double noise =
        10.0 * std::sqrt(std::max({mu_fin, std::abs(hi), 0.0}) + 1e-18);
    const int rc = certified_rank(face, noise, opts.tol.fr_rank_eps);
    if (rc >= 1) {
      if (auto pol = polish_certificate(inst, s, rc, y)) {
        if (opts.verbose)
          std::cerr << "[facial] order " << s << ": certificate polished at "
                    << "rank " << rc << "\n";
        y = *pol;
      } else if (opts.verbose) {
        std::cerr << "[facial] order " << s << ": polish at rank " << rc
                  << " did not converge, keeping the raw minimizer\n";
      }
    }
    // Loose sanity only; the caller re-verifies after normalization.
    const double loose = 1e3 * thr;
    if (std::abs(face.trace() - 1.0) > loose)
      throw ConvergenceError(
          "alternative pair: reducing certificate trace misses 1 by " +
          fmt(std::abs(face.trace() - 1.0)));
    double amax = 0.0;
    for (const auto& a : inst.A) amax = std::max(amax, a.frob_norm());
    if (norm_inf(adjoint(inst, y)) > loose * (1.0 + amax * y.frob_norm()))
      throw ConvergenceError(
          "alternative pair: reducing certificate violates the operator "
          "equations");
    return GordanZero{std::move(y)};
  }
  throw ConvergenceError("alternative pair at face order " + std::to_string(s) +
                         " is numerically ambiguous: values " +
                         fmt(res.primal_value) + " and " +
                         fmt(res.dual_value) + " straddle " + fmt(thr));
}

ReduceStep reduce_step(const SdpInstance& inst, int s, const SymMat& y,
                       const FacialOptions& opts) {
  const int n = inst.n;
  if (y.order() != n)
    throw DimensionError("reduce_step: certificate order mismatch");
  if (s < 1 || s > n)
    throw DimensionError("reduce_step: face order must lie in 1..n");

  const SymMat face = principal_submatrix(y, 1, s);
  const SpectralDecomposition sd = spectral(face);
  const double lmax = sd.eigenvalues.back();
  const double cut = opts.tol.fr_rank_eps * std::max(1.0, lmax);
  if (sd.eigenvalues.front() < -cut)
    throw NotPsdError("reduce_step: certificate face block has eigenvalue " +
                      fmt(sd.eigenvalues.front()));
  int r = 0;
  for (double lv : sd.eigenvalues)
    if (lv > cut) ++r;
  if (r == 0)
    throw Error("reduce_step: certificate face block is numerically zero");

  // Eigenvalues ascend, so kernel columns come first and range columns last.
  // Scaling the range columns by sqrt(lambda) yields R with R^{-1} Y R^{-T}
  // equal to 0 (+) I_r on the face, without ever forming an inverse.
  Mat rface(s, s);
  for (int j = 0; j < s; ++j) {
    const double lv = sd.eigenvalues[j];
    const double sc = lv > cut ? std::sqrt(lv) : 1.0;
    for (int i = 0; i < s; ++i) rface(i, j) = sd.eigenvectors(i, j) * sc;
  }
  const Mat rfull = s == n ? rface : diag_concat(rface, Mat::identity(n - s));
  std::ostringstream label;
  label << "face-split rank " << r << " at order " << s;
  RescalingTransform tr =
      RescalingTransform::from(rfull, label.str(), opts.tol.cond_warn);

  ReduceStep st;
  st.inst = rescale(inst, tr);
  st.transform = tr;
  st.rank = r;
  SymMat yn = push_dual(tr, y);
  // Snap the face of the mapped certificate onto its exact 0 / I pattern.
  // The kernel eigenvalues were declared zero by the rank cut, so deviations
  // up to that cut are expected; anything larger is a logic error.
  double dev = 0.0;
  for (int i = 0; i < s; ++i)
    for (int j = i; j < s; ++j) {
      const double want = (i == j && i >= s - r) ? 1.0 : 0.0;
      dev = std::max(dev, std::abs(yn(i, j) - want));
      yn.set(i, j, want);
    }
  if (dev > 4.0 * cut * (1.0 + yn.max_abs()) + opts.tol.tol_clean)
    throw Error("reduce_step: transformed certificate misses its block "
                "pattern by " +
                fmt(dev));
  st.cert = std::move(yn);
  return st;
}

FacialReductionResult facial_reduction(const SdpInstance& inst,
                                       const FacialOptions& opts) {
  const int n = inst.n;
  SdpInstance cur = inst;
  RescalingTransform acc = RescalingTransform::identity(n);
  std::vector<SymMat> certs;
  std::vector<int> sizes;
  int s = n;
  int r = -1;
  Vec xstar;
  double margin = 0.0;

  while (true) {
    if (s == 0) {
      // Every slack is pinned to zero: the face is empty. Recover a point
      // with vanishing slack by least squares on B = sum_i x_i A_i.
      r = 0;
      SymMat gram(cur.m);
      Vec rhs(cur.m);
      for (int i = 0; i < cur.m; ++i) {
        for (int j = i; j < cur.m; ++j)
          gram.set(i, j, inner_product(cur.A[i], cur.A[j]));
        rhs[i] = inner_product(cur.A[i], cur.B);
      }
      xstar = pseudo_inverse(gram, 1e-12).to_mat().apply(rhs);
      break;
    }
    GordanOutcome got = gordan_pair(cur, s, opts);
    if (const auto* pos = std::get_if<GordanPositive>(&got)) {
      r = s;
      xstar = pos->x;
      const SymMat raw = cur.B - apply_operator(cur, xstar);
      const SymMat face = principal_submatrix(raw, 1, r);
      const SpectralDecomposition sd = spectral(face);
      margin = sd.eigenvalues.front();
      if (!(margin > 0.0))
        throw ConvergenceError(
            "facial_reduction: maximal slack is singular on its face "
            "(margin " +
            fmt(margin) + ")");
      if (opts.verbose)
        std::cerr << "[facial] face order " << r << " is maximal; margin "
                  << fmt(margin) << "\n";
      Mat qhat(r, r);
      for (int j = 0; j < r; ++j) {
        const double sc = 1.0 / std::sqrt(sd.eigenvalues[j]);
        for (int i = 0; i < r; ++i) qhat(i, j) = sd.eigenvectors(i, j) * sc;
      }
      const Mat tfin = r == n ? qhat : diag_concat(qhat, Mat::identity(n - r));
      RescalingTransform fin = RescalingTransform::from(
          tfin, "slack-normalize", opts.tol.cond_warn);
      cur = rescale(cur, fin);
      for (auto& yk : certs) yk = push_dual(fin, yk);
      acc = acc.then(fin);
      break;
    }
    SymMat y = std::move(std::get<GordanZero>(got).y);
    ReduceStep st = reduce_step(cur, s, y, opts);
    if (opts.verbose)
      std::cerr << "[facial] order " << s << ": reducing by rank " << st.rank
                << "\n";
    cur = std::move(st.inst);
    for (auto& yk : certs) yk = push_dual(st.transform, yk);
    certs.push_back(std::move(st.cert));
    sizes.push_back(st.rank);
    acc = acc.then(st.transform);
    s -= st.rank;
  }

  auto slk = slack_of(cur, xstar, opts.tol.tol_cone);
  if (std::holds_alternative<NotFeasible>(slk))
    throw ConvergenceError(
        "facial_reduction: recovered point left the cone (curvature " +
        fmt(std::get<NotFeasible>(slk).curvature) +
        "); the instance is likely infeasible");
  Slack sl = std::get<Slack>(std::move(slk));
  double dev = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double want = (i == j && i < r) ? 1.0 : 0.0;
      dev = std::max(dev, std::abs(sl.S(i, j) - want));
    }
  if (dev > opts.tol.tol_fr * (1.0 + sl.S.max_abs()))
    throw ConvergenceError(
        "facial_reduction: normalized slack misses I_r (+) 0 by " + fmt(dev));

  FacialReductionResult out;
  out.reduced = std::move(cur);
  out.cert.n = n;
  out.cert.face_rank = r;
  out.cert.block_sizes = sizes;
  out.cert.ys = std::move(certs);
  out.cert.transform = acc;
  out.slack_report.slack = std::move(sl);
  out.slack_report.rank = r;
  out.slack_report.slater_margin = margin;
  out.steps = static_cast<int>(sizes.size());
  return out;
}

CertificateCheck verify_certificate(const SdpInstance& original,
                                    const FacialCertificate& cert,
                                    double tol) {
  CertificateCheck chk;
  auto fail = [&chk](const std::string& msg) { chk.failures.push_back(msg); };
  const int n = original.n;
  if (cert.n != n) {
    fail("certificate order differs from the instance");
    return chk;
  }
  if (cert.face_rank < 0 || cert.face_rank > n) {
    fail("face rank out of range");
    return chk;
  }
  if (cert.ys.size() != cert.block_sizes.size()) {
    fail("certificate count differs from the block-size count");
    return chk;
  }
  long total = 0;
  for (int rl : cert.block_sizes) {
    if (rl < 1) {
      fail("non-positive block size");
      return chk;
    }
    total += rl;
  }
  if (total != n - cert.face_rank) {
    fail("block sizes do not sum to n - face_rank");
    return chk;
  }
  if (cert.transform.order() != n) {
    fail("transform order differs from the instance");
    return chk;
  }

  const SdpInstance red = rescale(original, cert.transform);
  double amax = red.B.frob_norm();
  for (const auto& a : red.A) amax = std::max(amax, a.frob_norm());

  // Walk the chain. Certificate i must be 0 on the still-active block except
  // for an exact identity of size r_i; entries touching already-eliminated
  // indices are unconstrained. Each must annihilate every constraint matrix
  // and B of the rescaled instance. Index elimination then forces the rows
  // of any psd slack to vanish outside the leading face_rank corner: on the
  // active block, <S, Y_i> = 0 reduces to the trace of S over the identity
  // block, and zero diagonal entries of a psd matrix kill their whole rows.
  int zeroed = n;
  for (std::size_t i = 0; i < cert.ys.size(); ++i) {
    const SymMat& yv = cert.ys[i];
    const std::string tag = "certificate " + std::to_string(i + 1);
    if (yv.order() != n) {
      fail(tag + " has wrong order");
      return chk;
    }
    const int ri = cert.block_sizes[i];
    const int zi = zeroed - ri;
    double pdev = 0.0;
    for (int a = 0; a < zeroed; ++a)
      for (int b = a; b < zeroed; ++b) {
        const double want = (a == b && a >= zi) ? 1.0 : 0.0;
        pdev = std::max(pdev, std::abs(yv(a, b) - want));
      }
    chk.max_pattern_residual = std::max(chk.max_pattern_residual, pdev);
    if (pdev > tol * (1.0 + yv.max_abs()))
      fail(tag + " misses its 0 / I pattern by " + fmt(pdev));

    double edev = std::abs(inner_product(red.B, yv));
    for (const auto& a : red.A)
      edev = std::max(edev, std::abs(inner_product(a, yv)));
    chk.max_eq_residual = std::max(chk.max_eq_residual, edev);
    if (edev > tol * (1.0 + amax * yv.frob_norm()))
      fail(tag + " violates the orthogonality equations by " + fmt(edev));

    zeroed = zi;
  }
  if (zeroed != cert.face_rank)
    fail("elimination stops at order " + std::to_string(zeroed) +
         " instead of the claimed face rank " +
         std::to_string(cert.face_rank));
  chk.valid = chk.failures.empty();
  return chk;
}

}  // namespace ramana
