#include "bridgekit/kernels.hpp"

namespace bridgekit::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace

const detail::Vtable& detail::scalar_vtable() {
  static const Vtable vt{dot_scalar, axpy_scalar};
  return vt;
}

}  // namespace bridgekit::kernels
