#include "bridgekit/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>

namespace bridgekit::kernels {
namespace {

std::atomic<const detail::Vtable*> g_vtable{nullptr};
std::atomic<Backend> g_backend{Backend::Scalar};

void resolve() {
  if (g_vtable.load(std::memory_order_acquire)) return;
  Backend b = Backend::Scalar;
#if defined(BRIDGEKIT_BUILD_AVX2)
  if (detail::cpu_has_avx2()) b = Backend::Avx2;
#endif
  if (const char* env = std::getenv("BRIDGEKIT_SIMD")) {
    std::string s(env);
    if (s == "scalar") {
      b = Backend::Scalar;
    } else if (s == "avx2") {
#if defined(BRIDGEKIT_BUILD_AVX2)
      if (!detail::cpu_has_avx2())
        throw std::runtime_error("BRIDGEKIT_SIMD=avx2 but CPU lacks AVX2");
      b = Backend::Avx2;
#else
      throw std::runtime_error("BRIDGEKIT_SIMD=avx2 but AVX2 not compiled in");
#endif
    } else {
      throw std::runtime_error("unknown BRIDGEKIT_SIMD value: " + s);
    }
  }
  force_backend(b);
}

const detail::Vtable& vt() {
  resolve();
  return *g_vtable.load(std::memory_order_acquire);
}

}  // namespace

bool detail::cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend active_backend() {
  resolve();
  return g_backend.load(std::memory_order_acquire);
}

std::string backend_name(Backend b) {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

void force_backend(Backend b) {
  const detail::Vtable* table = nullptr;
  switch (b) {
    case Backend::Scalar:
      table = &detail::scalar_vtable();
      break;
    case Backend::Avx2:
#if defined(BRIDGEKIT_BUILD_AVX2)
      if (!detail::cpu_has_avx2())
        throw std::runtime_error("AVX2 backend unavailable on this CPU");
      table = &detail::avx2_vtable();
      break;
#else
      throw std::runtime_error("AVX2 backend not compiled in");
#endif
  }
  g_backend.store(b, std::memory_order_release);
  g_vtable.store(table, std::memory_order_release);
}

double dot(const double* x, const double* y, std::size_t n) {
  return vt().dot(x, y, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  vt().axpy(a, x, y, n);
}

void matvec(const double* w, const double* x, const double* b, double* y,
            std::size_t rows, std::size_t cols) {
  const auto& v = vt();
  for (std::size_t i = 0; i < rows; ++i) {
    y[i] = v.dot(w + i * cols, x, cols) + (b ? b[i] : 0.0);
  }
}

void ger_acc(const double* r, const double* x, double* g, std::size_t rows,
             std::size_t cols) {
  const auto& v = vt();
  for (std::size_t i = 0; i < rows; ++i) {
    v.axpy(r[i], x, g + i * cols, cols);
  }
}

}  // namespace bridgekit::kernels
