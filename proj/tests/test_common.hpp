#ifndef RAMANA_TEST_COMMON_HPP
#define RAMANA_TEST_COMMON_HPP

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "ramana/mat.hpp"
#include "ramana/sdp.hpp"
#include "ramana/symmat.hpp"

// Always-on requirement: never compiled out in Release.
#define REQUIRE(cond, msg)                                             \
  do {                                                                 \
    if (!(cond)) {                                                     \
      std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " "     \
                << msg << "\n";                                        \
      std::exit(1);                                                    \
    }                                                                  \
  } while (0)

#define REQUIRE_NEAR(a, b, tol, msg)                                   \
  do {                                                                 \
    const double lhs_ = (a);                                           \
    const double rhs_ = (b);                                           \
    REQUIRE(std::abs(lhs_ - rhs_) <= (tol),                            \
            msg << " (got " << lhs_ << ", want " << rhs_ << " +/- "    \
                << (tol) << ")");                                      \
  } while (0)

namespace testutil {

inline std::string fixture(const std::string& name) {
  return std::string(RAMANA_FIXTURE_DIR) + "/" + name;
}

// --- deterministic random data ------------------------------------------

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline ramana::SymMat random_sym(std::mt19937_64& rng, int n,
                                 double scale = 1.0) {
  ramana::SymMat s(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) s.set(i, j, uniform(rng, -scale, scale));
  return s;
}

// Orthonormal columns via Gram-Schmidt on a Gaussian matrix.
inline ramana::Mat random_orthogonal(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ramana::Mat q(n, n);
  for (int col = 0; col < n; ++col) {
    ramana::Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = gauss(rng);
    for (int prev = 0; prev < col; ++prev) {
      double dp = 0.0;
      for (int i = 0; i < n; ++i) dp += v[i] * q(i, prev);
      for (int i = 0; i < n; ++i) v[i] -= dp * q(i, prev);
    }
    double nrm = 0.0;
    for (int i = 0; i < n; ++i) nrm += v[i] * v[i];
    nrm = std::sqrt(nrm);
    if (nrm < 1e-12) return random_orthogonal(rng, n);  // resample
    for (int i = 0; i < n; ++i) q(i, col) = v[i] / nrm;
  }
  return q;
}

// PSD matrix of exact rank r with nonzero eigenvalues in [lo, hi]; the
// spectrum stays far from any rank threshold by construction.
inline ramana::SymMat random_psd_rank(std::mt19937_64& rng, int n, int r,
                                      double lo = 0.5, double hi = 2.0) {
  const ramana::Mat q = random_orthogonal(rng, n);
  ramana::SymMat s(n);
  for (int k = 0; k < r; ++k) {
    const double lam = uniform(rng, lo, hi);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) s.add(i, j, lam * q(i, k) * q(j, k));
  }
  return s;
}

// Invertible matrix with singular values in [1/sqrt(kappa), sqrt(kappa)],
// so cond <= kappa.
inline ramana::Mat random_invertible(std::mt19937_64& rng, int n,
                                     double kappa = 100.0) {
  const ramana::Mat q1 = random_orthogonal(rng, n);
  const ramana::Mat q2 = random_orthogonal(rng, n);
  const double smax = std::sqrt(kappa);
  ramana::Mat d(n, n);
  for (int i = 0; i < n; ++i) d(i, i) = uniform(rng, 1.0 / smax, smax);
  return q1 * d * q2.transpose();
}

// --- the two worked instances -------------------------------------------

// sup 2x  s.t.  x * [[0,1],[1,0]] <= [[1,0],[0,0]].
// Value 0; the classical dual attains no minimizer.
inline ramana::SdpInstance ex1_instance() {
  ramana::SymMat a1(2), b(2);
  a1.set(0, 1, 1.0);
  b.set(0, 0, 1.0);
  return ramana::SdpInstance::create({a1}, b, {2.0});
}

// Order 4, three constraints; positive duality gap of exactly 1.
inline ramana::SdpInstance ex4_instance() {
  ramana::SymMat a1(4), a2(4), a3(4), b(4);
  a1.set(0, 0, 1.0);
  a2.set(0, 2, 1.0);
  a2.set(1, 1, 1.0);
  a3.set(1, 3, 1.0);
  a3.set(2, 2, 1.0);
  b.set(0, 0, 1.0);
  b.set(1, 1, 1.0);
  return ramana::SdpInstance::create({a1, a2, a3}, b, {0.0, 1.0, 1.0});
}

// --- random instance families --------------------------------------------

// Primal-dual strictly feasible instance: B > 0 makes x = 0 a Slater point
// of (P); c is chosen as the image of an interior Y0, making (D) strictly
// feasible, so both values are finite and equal.
inline ramana::SdpInstance random_slater_instance(std::mt19937_64& rng, int n,
                                                  int m) {
  std::vector<ramana::SymMat> a;
  a.reserve(m);
  for (int i = 0; i < m; ++i) a.push_back(random_sym(rng, n));
  ramana::SymMat b = random_psd_rank(rng, n, n, 0.5, 2.0);
  for (int i = 0; i < n; ++i) b.add(i, i, 0.5);
  ramana::SymMat y0 = random_psd_rank(rng, n, n, 0.5, 2.0);
  for (int i = 0; i < n; ++i) y0.add(i, i, 0.5);
  ramana::Vec c(m);
  for (int i = 0; i < m; ++i) c[i] = ramana::inner_product(a[i], y0);
  return ramana::SdpInstance::create(std::move(a), std::move(b), std::move(c));
}

// Instance whose data all live in the leading r x r block: every slack is
// supported on that face, B restricted to the face is positive definite, and
// c comes from a face-interior Y0 so the reduced pair has no gap.
inline ramana::SdpInstance embedded_face_instance(std::mt19937_64& rng, int n,
                                                  int r, int m) {
  auto pad = [&](const ramana::SymMat& s) {
    ramana::SymMat out(n);
    for (int i = 0; i < r; ++i)
      for (int j = i; j < r; ++j) out.set(i, j, s(i, j));
    return out;
  };
  std::vector<ramana::SymMat> a;
  a.reserve(m);
  for (int i = 0; i < m; ++i) a.push_back(pad(random_sym(rng, r)));
  ramana::SymMat bf = random_psd_rank(rng, r, r, 0.5, 2.0);
  for (int i = 0; i < r; ++i) bf.add(i, i, 0.5);
  ramana::SymMat yf = random_psd_rank(rng, r, r, 0.5, 2.0);
  for (int i = 0; i < r; ++i) yf.add(i, i, 0.5);
  const ramana::SymMat y0 = pad(yf);
  ramana::Vec c(m);
  for (int i = 0; i < m; ++i) c[i] = ramana::inner_product(a[i], y0);
  return ramana::SdpInstance::create(std::move(a), pad(bf), std::move(c));
}

}  // namespace testutil

#endif
