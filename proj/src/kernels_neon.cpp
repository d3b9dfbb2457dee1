#include "lerg/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace lerg::kern::detail {

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
  }
  double r = vaddvq_f64(acc);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vy = vld1q_f64(y + i);
    vy = vfmaq_f64(vy, va, vld1q_f64(x + i));
    vst1q_f64(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_add_neon(double a, const double* x, double b, const double* y,
                    double* out, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  const float64x2_t vb = vdupq_n_f64(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t t = vmulq_f64(vb, vld1q_f64(y + i));
    t = vfmaq_f64(t, va, vld1q_f64(x + i));
    vst1q_f64(out + i, t);
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void scale_neon(double a, double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) x[i] *= a;
}

}  // namespace

bool neon_supported() { return true; }

Ops neon_ops() {
  return Ops{dot_neon, axpy_neon, scale_add_neon, scale_neon};
}

}  // namespace lerg::kern::detail

#else

namespace lerg::kern::detail {
bool neon_supported() { return false; }
Ops neon_ops() { return scalar_ops(); }
}  // namespace lerg::kern::detail

#endif
