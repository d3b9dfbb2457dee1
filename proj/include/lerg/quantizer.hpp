#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lerg/matrix.hpp"

namespace lerg {

/// Forward rounding behavior of the fake-quantization pass. `identity`
/// replaces rounding by the identity map (clip-and-scale surrogate) and
/// exists for gradient verification; artifacts always use `nearest`.
enum class RoundMode { nearest, identity };

/// Integer codebook grid plus a learned per-row step size.
struct QuantizedCodebook {
  std::size_t c = 0;
  std::size_t d = 0;
  int bits = 16;
  std::vector<std::int32_t> grid;  // c x d row-major, within [q_min, q_max]
  std::vector<double> step;        // per-row, positive

  std::int32_t q_min() const { return -(1 << (bits - 1)); }
  std::int32_t q_max() const { return (1 << (bits - 1)) - 1; }
  void validate() const;
};

/// grid[j,k] = round(clip(E[j,k] / step[j], q_min, q_max)), rounding
/// half-away-from-zero.
QuantizedCodebook quantize(const Matrix& codebook,
                           const std::vector<double>& step, int bits);

Matrix dequantize(const QuantizedCodebook& q);

/// dequantize(quantize(E)) without materializing the integer grid; respects
/// the requested rounding mode.
Matrix fake_quantize(const Matrix& codebook, const std::vector<double>& step,
                     int bits, RoundMode mode = RoundMode::nearest);

struct QatGrads {
  Matrix codebook;           // c x d
  std::vector<double> step;  // c
};

/// Straight-through backward of the fake-quantization pass.
/// grad_codebook passes grad_out through where E/step lies inside
/// [q_min, q_max] and zeroes it outside. grad_step accumulates
/// round(z) - z inside the range and the clip value outside.
/// When lsq_grad_scale is set the step gradient is multiplied by
/// 1 / sqrt(c * d * q_max).
QatGrads qat_backward(const Matrix& grad_out, const Matrix& codebook,
                      const std::vector<double>& step, int bits,
                      RoundMode mode = RoundMode::nearest,
                      bool lsq_grad_scale = false);

/// step[j] = 2 * mean(|E[j,:]|) / sqrt(q_max), floored away from zero.
std::vector<double> init_step(const Matrix& codebook, int bits);

struct StorageReport {
  std::uint64_t codebook_bytes = 0;
  std::uint64_t assignment_bytes = 0;
  std::uint64_t placeholder_bytes = 0;
  std::uint64_t total_bytes = 0;
};

/// Deployment byte accounting: quantized codebook (grid at b bits plus f32
/// step vector), assignment matrix (two u32 per entity), placeholder
/// codebook (f32 centroids plus u32 assignment for the N - m pruned
/// entities).
StorageReport storage_bytes(std::size_t c, std::size_t d, int bits,
                            std::size_t r, std::size_t n, std::size_t m);

void save_quantized(const std::string& path, const QuantizedCodebook& q);
QuantizedCodebook load_quantized(const std::string& path);

}  // namespace lerg
