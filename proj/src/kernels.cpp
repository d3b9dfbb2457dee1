#include "lerg/kernels.hpp"

#include <cstdlib>
#include <stdexcept>

namespace lerg::kern {

namespace {

struct Dispatch {
  detail::Ops ops;
  Backend backend;
};

Dispatch make_default() {
  const char* env = std::getenv("LERG_KERNELS");
  if (env != nullptr) {
    std::string v(env);
    if (v == "scalar") return {detail::scalar_ops(), Backend::scalar};
    if (v == "avx2" && detail::avx2_supported())
      return {detail::avx2_ops(), Backend::avx2};
    if (v == "neon" && detail::neon_supported())
      return {detail::neon_ops(), Backend::neon};
    // Unknown or unsupported request falls through to auto-detection.
  }
  if (detail::avx2_supported()) return {detail::avx2_ops(), Backend::avx2};
  if (detail::neon_supported()) return {detail::neon_ops(), Backend::neon};
  return {detail::scalar_ops(), Backend::scalar};
}

Dispatch& dispatch() {
  static Dispatch d = make_default();
  return d;
}

}  // namespace

Backend active_backend() { return dispatch().backend; }

void force_backend(Backend b) {
  switch (b) {
    case Backend::scalar:
      dispatch() = {detail::scalar_ops(), Backend::scalar};
      return;
    case Backend::avx2:
      if (!detail::avx2_supported())
        throw std::runtime_error("AVX2 kernels not supported on this CPU");
      dispatch() = {detail::avx2_ops(), Backend::avx2};
      return;
    case Backend::neon:
      if (!detail::neon_supported())
        throw std::runtime_error("NEON kernels not supported on this CPU");
      dispatch() = {detail::neon_ops(), Backend::neon};
      return;
  }
  throw std::runtime_error("unknown kernel backend");
}

std::string backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "?";
}

double dot(const double* a, const double* b, std::size_t n) {
  return dispatch().ops.dot(a, b, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  dispatch().ops.axpy(a, x, y, n);
}

void scale_add(double a, const double* x, double b, const double* y,
               double* out, std::size_t n) {
  dispatch().ops.scale_add(a, x, b, y, out, n);
}

void scale(double a, double* x, std::size_t n) {
  dispatch().ops.scale(a, x, n);
}

}  // namespace lerg::kern
