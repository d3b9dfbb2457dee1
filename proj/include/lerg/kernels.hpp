#pragma once

#include <cstddef>
#include <string>

// Dense vector kernels used by the sparse propagation, composition and
// optimizer inner loops. A scalar reference implementation always exists;
// AVX2 (x86-64) and NEON (aarch64) variants are selected at runtime when the
// CPU supports them. The SIMD variants are equivalence-tested against the
// scalar reference in tests/unit/test_kernels.cpp.
namespace lerg::kern {

enum class Backend { scalar, avx2, neon };

// Backend currently wired into the dispatch table.
Backend active_backend();

// Override the dispatch (tests, or LERG_KERNELS=scalar|avx2|neon).
// Throws std::runtime_error if the requested backend is unsupported here.
void force_backend(Backend b);

std::string backend_name(Backend b);

double dot(const double* a, const double* b, std::size_t n);

// y += a * x
void axpy(double a, const double* x, double* y, std::size_t n);

// out = a * x + b * y
void scale_add(double a, const double* x, double b, const double* y,
               double* out, std::size_t n);

// x *= a
void scale(double a, double* x, std::size_t n);

namespace detail {

struct Ops {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale_add)(double, const double*, double, const double*, double*,
                    std::size_t);
  void (*scale)(double, double*, std::size_t);
};

Ops scalar_ops();
bool avx2_supported();
Ops avx2_ops();
bool neon_supported();
Ops neon_ops();

}  // namespace detail

}  // namespace lerg::kern
