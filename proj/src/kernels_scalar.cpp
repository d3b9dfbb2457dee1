#include "lerg/kernels.hpp"

namespace lerg::kern::detail {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_add_scalar(double a, const double* x, double b, const double* y,
                      double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void scale_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

}  // namespace

Ops scalar_ops() {
  return Ops{dot_scalar, axpy_scalar, scale_add_scalar, scale_scalar};
}

}  // namespace lerg::kern::detail
