#include "ramana/kernels.hpp"

#include <cstdlib>
#include <mutex>

namespace ramana::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void gemm_acc_scalar(const double* a, const double* b, double* c,
                     std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    double* crow = c + i * n;
    for (std::size_t l = 0; l < k; ++l) {
      const double av = arow[l];
      if (av == 0.0) continue;
      const double* brow = b + l * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

const Backend* g_active = nullptr;
std::once_flag g_init_flag;

const Backend* pick(const std::string& name) {
  if (name == "scalar") return &detail::scalar_backend;
#ifdef RAMANA_BUILD_AVX2
  if (name == "avx2" && detail::avx2_supported()) return &detail::avx2_backend;
#endif
#ifdef RAMANA_BUILD_NEON
  if (name == "neon") return &detail::neon_backend;
#endif
  return nullptr;
}

const Backend* best() {
#ifdef RAMANA_BUILD_AVX2
  if (detail::avx2_supported()) return &detail::avx2_backend;
#endif
#ifdef RAMANA_BUILD_NEON
  return &detail::neon_backend;
#endif
  return &detail::scalar_backend;
}

void init_once() {
  std::call_once(g_init_flag, [] {
    if (const char* env = std::getenv("RAMANA_KERNEL")) {
      if (const Backend* b = pick(env)) {
        g_active = b;
        return;
      }
    }
    g_active = best();
  });
}

}  // namespace

namespace detail {
const Backend scalar_backend = {"scalar", dot_scalar, axpy_scalar,
                                scale_scalar, gemm_acc_scalar};
}  // namespace detail

const Backend& active() {
  init_once();
  return *g_active;
}

const char* active_name() { return active().name; }

bool select(const std::string& name) {
  init_once();
  const Backend* b = pick(name);
  if (!b) return false;
  g_active = b;
  return true;
}

std::vector<std::string> available() {
  std::vector<std::string> out{"scalar"};
#ifdef RAMANA_BUILD_AVX2
  if (detail::avx2_supported()) out.push_back("avx2");
#endif
#ifdef RAMANA_BUILD_NEON
  out.push_back("neon");
#endif
  return out;
}

}  // namespace ramana::kernels
