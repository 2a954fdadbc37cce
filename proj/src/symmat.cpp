#include "ramana/symmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "ramana/kernels.hpp"

namespace ramana {

SymMat::SymMat(int n) : n_(n) {
  if (n < 1) throw DimensionError("symmetric matrix order must be >= 1");
  a_.assign(static_cast<std::size_t>(n) * n, 0.0);
}

SymMat SymMat::identity(int n) {
  SymMat x(n);
  for (int i = 0; i < n; ++i) x.a_[x.idx(i, i)] = 1.0;
  return x;
}

SymMat SymMat::diag(const Vec& d) {
  SymMat x(static_cast<int>(d.size()));
  for (int i = 0; i < x.n_; ++i) x.a_[x.idx(i, i)] = d[i];
  return x;
}

SymMat SymMat::from_dense(const Mat& x, double sym_tol) {
  if (x.rows() != x.cols()) throw DimensionError("matrix is not square");
  const int n = x.rows();
  double dev = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      dev = std::max(dev, std::abs(x(i, j) - x(j, i)));
  const double scale = x.max_abs();
  if (dev > sym_tol * (scale > 0 ? scale : 1.0))
    throw SymmetryError("asymmetry " + std::to_string(dev) +
                        " exceeds tolerance");
  SymMat s(n);
  for (int i = 0; i < n; ++i) {
    s.a_[s.idx(i, i)] = x(i, i);
    for (int j = i + 1; j < n; ++j) {
      const double v = 0.5 * (x(i, j) + x(j, i));
      s.a_[s.idx(i, j)] = v;
      s.a_[s.idx(j, i)] = v;
    }
  }
  return s;
}

SymMat SymMat::from_rows(int n, Vec row_major, double sym_tol) {
  return from_dense(Mat::from_rows(n, n, std::move(row_major)), sym_tol);
}

void SymMat::set(int i, int j, double v) {
  a_[idx(i, j)] = v;
  a_[idx(j, i)] = v;
}

void SymMat::add(int i, int j, double v) {
  a_[idx(i, j)] += v;
  if (i != j) a_[idx(j, i)] += v;
}

Mat SymMat::to_mat() const { return Mat::from_rows(n_, n_, a_); }

SymMat SymMat::operator+(const SymMat& rhs) const {
  if (n_ != rhs.n_) throw DimensionError("symmetric sum order mismatch");
  SymMat c = *this;
  kernels::axpy(1.0, rhs.a_.data(), c.a_.data(), c.a_.size());
  return c;
}

SymMat SymMat::operator-(const SymMat& rhs) const {
  if (n_ != rhs.n_) throw DimensionError("symmetric difference order mismatch");
  SymMat c = *this;
  kernels::axpy(-1.0, rhs.a_.data(), c.a_.data(), c.a_.size());
  return c;
}

SymMat SymMat::scaled(double alpha) const {
  SymMat c = *this;
  kernels::scale(alpha, c.a_.data(), c.a_.size());
  return c;
}

double SymMat::trace() const {
  double t = 0.0;
  for (int i = 0; i < n_; ++i) t += a_[idx(i, i)];
  return t;
}

double SymMat::frob_norm() const {
  return std::sqrt(kernels::dot(a_.data(), a_.data(), a_.size()));
}

double SymMat::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

double inner_product(const SymMat& x, const SymMat& y) {
  if (x.order() != y.order())
    throw DimensionError("inner product order mismatch");
  return kernels::dot(x.data(), y.data(),
                      static_cast<std::size_t>(x.order()) * x.order());
}

SpectralDecomposition spectral(const SymMat& x) {
  const int n = x.order();
  Mat a = x.to_mat();
  Mat v = Mat::identity(n);

  auto off_norm = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
  };

  const double total = x.frob_norm();
  const double stop = 1e-15 * (total > 0 ? total : 1.0);
  const int max_sweeps = 128;
  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const double off = off_norm();
    if (off <= stop) {
      converged = true;
      break;
    }
    // Rotations below this threshold are skipped early on; classic schedule.
    const double thresh = (sweep < 3) ? 0.2 * off * off / (n * n) : 0.0;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        const double g = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
            std::abs(a(q, q)) + g == std::abs(a(q, q))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        if (apq * apq <= thresh) continue;
        const double theta = 0.5 * (a(q, q) - a(p, p)) / apq;
        double t;
        if (std::abs(theta) > 1e12) {
          t = 0.5 / theta;
        } else {
          t = ((theta >= 0) ? 1.0 : -1.0) /
              (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = aip - s * (aiq + tau * aip);
          a(p, i) = a(i, p);
          a(i, q) = aiq + s * (aip - tau * aiq);
          a(q, i) = a(i, q);
        }
        for (int i = 0; i < n; ++i) {
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = vip - s * (viq + tau * vip);
          v(i, q) = viq + s * (vip - tau * viq);
        }
      }
    }
  }
  if (!converged)
    throw ConvergenceError("Jacobi eigensolver failed to converge");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Stable: ties keep their original column order, so already-diagonal input
  // (zero blocks included) yields identity eigenvectors deterministically.
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a(i, i) < a(j, j); });
  SpectralDecomposition d;
  d.eigenvalues.resize(n);
  d.eigenvectors = Mat(n, n);
  for (int j = 0; j < n; ++j) {
    d.eigenvalues[j] = a(order[j], order[j]);
    for (int i = 0; i < n; ++i) d.eigenvectors(i, j) = v(i, order[j]);
  }
  return d;
}

PsdResult psd_check(const SymMat& x, double tol) {
  SpectralDecomposition d = spectral(x);
  const int n = x.order();
  PsdResult r;
  r.lambda_min = d.eigenvalues.front();
  r.lambda_max = d.eigenvalues.back();
  const double mag =
      std::max(std::abs(r.lambda_min), std::abs(r.lambda_max));
  r.psd = r.lambda_min >= -tol * (1.0 + mag);
  if (!r.psd) {
    Vec z(n);
    for (int i = 0; i < n; ++i) z[i] = d.eigenvectors(i, 0);
    r.witness = std::move(z);
  }
  return r;
}

int numerical_rank(const SymMat& x, double eps_rank) {
  SpectralDecomposition d = spectral(x);
  const double lmax = d.eigenvalues.back();
  const double cut = eps_rank * std::max(1.0, lmax);
  if (d.eigenvalues.front() < -cut)
    throw NotPsdError("numerical_rank requires a psd matrix, lambda_min = " +
                      std::to_string(d.eigenvalues.front()));
  int rank = 0;
  for (double l : d.eigenvalues)
    if (l > cut) ++rank;
  return rank;
}

SymMat principal_submatrix(const SymMat& y, int r, int s) {
  if (r < 1 || s > y.order() || r > s)
    throw DimensionError("principal submatrix range out of bounds");
  SymMat out(s - r + 1);
  for (int i = r - 1; i < s; ++i)
    for (int j = r - 1; j <= i; ++j) out.set(i - r + 1, j - r + 1, y(i, j));
  return out;
}

SymMat diag_concat(const SymMat& a, const SymMat& b) {
  SymMat out(a.order() + b.order());
  for (int i = 0; i < a.order(); ++i)
    for (int j = 0; j <= i; ++j) out.set(i, j, a(i, j));
  const int off = a.order();
  for (int i = 0; i < b.order(); ++i)
    for (int j = 0; j <= i; ++j) out.set(off + i, off + j, b(i, j));
  return out;
}

Mat diag_concat(const Mat& a, const Mat& b) {
  Mat out(a.rows() + b.rows(), a.cols() + b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) out(a.rows() + i, a.cols() + j) = b(i, j);
  return out;
}

Mat projector_onto_range(const SymMat& u, double eps_rank) {
  SpectralDecomposition d = spectral(u);
  const int n = u.order();
  const double lmax = d.eigenvalues.back();
  if (d.eigenvalues.front() < -eps_rank * std::max(1.0, lmax))
    throw NotPsdError("projector requires a psd matrix");
  const double cut = eps_rank * std::max(lmax, 0.0);
  Mat p(n, n);
  for (int k = 0; k < n; ++k) {
    if (d.eigenvalues[k] <= cut) continue;
    for (int i = 0; i < n; ++i) {
      const double qik = d.eigenvectors(i, k);
      if (qik == 0.0) continue;
      for (int j = 0; j < n; ++j) p(i, j) += qik * d.eigenvectors(j, k);
    }
  }
  return p;
}

SymMat pseudo_inverse(const SymMat& u, double eps_rank) {
  SpectralDecomposition d = spectral(u);
  const int n = u.order();
  const double lmax = d.eigenvalues.back();
  if (d.eigenvalues.front() < -eps_rank * std::max(1.0, lmax))
    throw NotPsdError("pseudo_inverse requires a psd matrix");
  const double cut = eps_rank * std::max(lmax, 0.0);
  SymMat p(n);
  for (int k = 0; k < n; ++k) {
    if (d.eigenvalues[k] <= cut) continue;
    const double w = 1.0 / d.eigenvalues[k];
    for (int i = 0; i < n; ++i) {
      const double qik = d.eigenvectors(i, k);
      if (qik == 0.0) continue;
      for (int j = 0; j <= i; ++j)
        p.add(i, j, w * qik * d.eigenvectors(j, k));
    }
  }
  return p;
}

double spectral_norm(const Mat& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  const Mat at = a.transpose();
  const Mat gram = (a.cols() <= a.rows()) ? (at * a) : (a * at);
  SymMat g = SymMat::from_dense(gram, 1e-6);
  SpectralDecomposition d = spectral(g);
  return std::sqrt(std::max(0.0, d.eigenvalues.back()));
}

bool range_contained(const Mat& w, const SymMat& u, double tol,
                     double eps_rank) {
  if (w.rows() != u.order())
    throw DimensionError("range test row count mismatch");
  const Mat p = projector_onto_range(u, eps_rank);
  const Mat residual = w - p * w;
  return spectral_norm(residual) <= tol * (1.0 + spectral_norm(w));
}

SymMat congruence(const Mat& t, const SymMat& x) {
  if (t.rows() != x.order()) throw DimensionError("congruence shape mismatch");
  const Mat xt = x.to_mat() * t;
  const Mat r = t.transpose() * xt;
  // Symmetric up to rounding by construction; average without a check.
  const int n = r.rows();
  SymMat out(n);
  for (int i = 0; i < n; ++i) {
    out.set(i, i, r(i, i));
    for (int j = 0; j < i; ++j) out.set(i, j, 0.5 * (r(i, j) + r(j, i)));
  }
  return out;
}

}  // namespace ramana
