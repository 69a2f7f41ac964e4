#pragma once

#include <cstddef>
#include <string>

// Dense double-precision kernels used by the MLP and the path samplers.
// A scalar reference implementation is always available; an AVX2 variant
// is selected at runtime when the CPU supports it. The two variants are
// equivalence-tested against each other (accumulation order differs, so
// results agree to rounding, not bit-exactly).
namespace bridgekit::kernels {

enum class Backend { Scalar, Avx2 };

// Backend resolved once per process: BRIDGEKIT_SIMD=scalar|avx2 overrides
// CPU detection.
Backend active_backend();
std::string backend_name(Backend b);

// Force a backend (tests only). Throws if the backend is unavailable.
void force_backend(Backend b);

double dot(const double* x, const double* y, std::size_t n);

// y += a * x
void axpy(double a, const double* x, double* y, std::size_t n);

// y = W x + b, W row-major [rows x cols], b may be null (treated as zero)
void matvec(const double* w, const double* x, const double* b, double* y,
            std::size_t rows, std::size_t cols);

// g += r x^T, g row-major [rows x cols]
void ger_acc(const double* r, const double* x, double* g, std::size_t rows,
             std::size_t cols);

namespace detail {
struct Vtable {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
};
const Vtable& scalar_vtable();
#if defined(BRIDGEKIT_BUILD_AVX2)
const Vtable& avx2_vtable();
#endif
bool cpu_has_avx2();
}  // namespace detail

}  // namespace bridgekit::kernels
