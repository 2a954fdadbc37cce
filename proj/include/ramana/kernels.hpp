#ifndef RAMANA_KERNELS_HPP
#define RAMANA_KERNELS_HPP

#include <cstddef>
#include <string>
#include <vector>

// Low-level dense kernels used by the matrix layer and the interior-point
// solver. A scalar reference implementation is always available; on x86 an
// AVX2 variant is selected at runtime when the CPU supports it, on aarch64 a
// NEON variant. The active backend can be forced with select() or with the
// environment variable RAMANA_KERNEL (values: scalar, avx2, neon), which is
// read once on first use. All variants compute the same results up to
// floating-point reassociation; the test suite checks them against each
// other.
namespace ramana::kernels {

struct Backend {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
  // C += A * B, row-major, A is m x k, B is k x n, C is m x n
  void (*gemm_acc)(const double* a, const double* b, double* c,
                   std::size_t m, std::size_t k, std::size_t n);
};

const Backend& active();
const char* active_name();
// Returns false if the named backend is unavailable on this machine.
bool select(const std::string& name);
std::vector<std::string> available();

inline double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
inline void scale(double alpha, double* x, std::size_t n) {
  active().scale(alpha, x, n);
}
inline void gemm_acc(const double* a, const double* b, double* c,
                     std::size_t m, std::size_t k, std::size_t n) {
  active().gemm_acc(a, b, c, m, k, n);
}

namespace detail {
extern const Backend scalar_backend;
#ifdef RAMANA_BUILD_AVX2
extern const Backend avx2_backend;
bool avx2_supported();
#endif
#ifdef RAMANA_BUILD_NEON
extern const Backend neon_backend;
#endif
}  // namespace detail

}  // namespace ramana::kernels

#endif
