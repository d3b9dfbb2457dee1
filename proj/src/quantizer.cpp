#include "lerg/quantizer.hpp"

#include <cmath>
#include <stdexcept>

#include "lerg/serialize.hpp"

namespace lerg {

namespace {

constexpr char kMagic[8] = {'L', 'E', 'R', 'G', 'Q', 'C', 'B', 'K'};

void check_bits(int bits) {
  if (bits != 4 && bits != 8 && bits != 16)
    throw std::invalid_argument("bit length must be 4, 8 or 16");
}

void check_step(const std::vector<double>& step, std::size_t c) {
  require(step.size() == c, "step vector length must equal codebook rows");
  for (double s : step)
    if (!(s > 0.0) || !std::isfinite(s))
      throw std::invalid_argument("step entries must be positive and finite");
}

// Half away from zero, fixed across platforms.
double round_half_away(double x) { return std::round(x); }

}  // namespace

void QuantizedCodebook::validate() const {
  check_bits(bits);
  require(grid.size() == c * d, "grid shape mismatch");
  check_step(step, c);
  for (std::int32_t g : grid)
    require(g >= q_min() && g <= q_max(), "grid entry out of range");
}

QuantizedCodebook quantize(const Matrix& codebook,
                           const std::vector<double>& step, int bits) {
  check_bits(bits);
  check_step(step, codebook.rows);
  QuantizedCodebook q;
  q.c = codebook.rows;
  q.d = codebook.cols;
  q.bits = bits;
  q.step = step;
  q.grid.resize(q.c * q.d);
  const double lo = q.q_min();
  const double hi = q.q_max();
  for (std::size_t j = 0; j < q.c; ++j) {
    const double inv = 1.0 / step[j];
    for (std::size_t k = 0; k < q.d; ++k) {
      double z = codebook.at(j, k) * inv;
      z = std::min(std::max(z, lo), hi);
      q.grid[j * q.d + k] = static_cast<std::int32_t>(round_half_away(z));
    }
  }
  return q;
}

Matrix dequantize(const QuantizedCodebook& q) {
  Matrix out(q.c, q.d);
  for (std::size_t j = 0; j < q.c; ++j)
    for (std::size_t k = 0; k < q.d; ++k)
      out.at(j, k) = static_cast<double>(q.grid[j * q.d + k]) * q.step[j];
  return out;
}

Matrix fake_quantize(const Matrix& codebook, const std::vector<double>& step,
                     int bits, RoundMode mode) {
  check_bits(bits);
  check_step(step, codebook.rows);
  const double lo = -(1 << (bits - 1));
  const double hi = (1 << (bits - 1)) - 1;
  Matrix out(codebook.rows, codebook.cols);
  for (std::size_t j = 0; j < codebook.rows; ++j) {
    const double s = step[j];
    for (std::size_t k = 0; k < codebook.cols; ++k) {
      double z = codebook.at(j, k) / s;
      z = std::min(std::max(z, lo), hi);
      if (mode == RoundMode::nearest) z = round_half_away(z);
      out.at(j, k) = z * s;
    }
  }
  return out;
}

QatGrads qat_backward(const Matrix& grad_out, const Matrix& codebook,
                      const std::vector<double>& step, int bits,
                      RoundMode mode, bool lsq_grad_scale) {
  check_bits(bits);
  check_step(step, codebook.rows);
  require(grad_out.same_shape(codebook), "gradient shape mismatch");
  const double lo = -(1 << (bits - 1));
  const double hi = (1 << (bits - 1)) - 1;
  QatGrads grads;
  grads.codebook = Matrix(codebook.rows, codebook.cols);
  grads.step.assign(codebook.rows, 0.0);
  for (std::size_t j = 0; j < codebook.rows; ++j) {
    const double s = step[j];
    double acc = 0.0;
    for (std::size_t k = 0; k < codebook.cols; ++k) {
      const double z = codebook.at(j, k) / s;
      const double g = grad_out.at(j, k);
      double dstep;
      if (z < lo) {
        dstep = lo;
      } else if (z > hi) {
        dstep = hi;
      } else {
        grads.codebook.at(j, k) = g;
        dstep = mode == RoundMode::nearest ? round_half_away(z) - z : 0.0;
      }
      acc += g * dstep;
    }
    grads.step[j] = acc;
  }
  if (lsq_grad_scale) {
    const double scale =
        1.0 / std::sqrt(static_cast<double>(codebook.rows) *
                        static_cast<double>(codebook.cols) * hi);
    for (double& g : grads.step) g *= scale;
  }
  return grads;
}

std::vector<double> init_step(const Matrix& codebook, int bits) {
  check_bits(bits);
  const double qmax = (1 << (bits - 1)) - 1;
  std::vector<double> step(codebook.rows, 0.0);
  for (std::size_t j = 0; j < codebook.rows; ++j) {
    double mean_abs = 0.0;
    for (std::size_t k = 0; k < codebook.cols; ++k)
      mean_abs += std::abs(codebook.at(j, k));
    mean_abs /= static_cast<double>(std::max<std::size_t>(1, codebook.cols));
    step[j] = std::max(2.0 * mean_abs / std::sqrt(qmax), 1e-8);
  }
  return step;
}

StorageReport storage_bytes(std::size_t c, std::size_t d, int bits,
                            std::size_t r, std::size_t n, std::size_t m) {
  require(m <= n, "retained count cannot exceed entity count");
  StorageReport rep;
  const std::uint64_t row_bytes =
      (static_cast<std::uint64_t>(bits) * d + 7) / 8;
  rep.codebook_bytes = static_cast<std::uint64_t>(c) * row_bytes +
                       4ULL * static_cast<std::uint64_t>(c);
  rep.assignment_bytes = 8ULL * static_cast<std::uint64_t>(n);
  rep.placeholder_bytes = 4ULL * static_cast<std::uint64_t>(r) * d +
                          4ULL * static_cast<std::uint64_t>(n - m);
  rep.total_bytes =
      rep.codebook_bytes + rep.assignment_bytes + rep.placeholder_bytes;
  return rep;
}

void save_quantized(const std::string& path, const QuantizedCodebook& q) {
  q.validate();
  io::Writer w(path);
  w.magic(kMagic);
  w.pod<std::uint32_t>(1);
  w.pod<std::uint64_t>(q.c);
  w.pod<std::uint64_t>(q.d);
  w.pod<std::uint8_t>(static_cast<std::uint8_t>(q.bits));
  for (double s : q.step) w.pod<float>(static_cast<float>(s));
  const std::size_t n = q.c * q.d;
  if (q.bits == 16) {
    for (std::size_t i = 0; i < n; ++i)
      w.pod<std::int16_t>(static_cast<std::int16_t>(q.grid[i]));
  } else if (q.bits == 8) {
    for (std::size_t i = 0; i < n; ++i)
      w.pod<std::int8_t>(static_cast<std::int8_t>(q.grid[i]));
  } else {
    // b = 4: packed nibbles, low nibble first, two's complement in [-8, 7].
    for (std::size_t i = 0; i < n; i += 2) {
      const std::uint8_t lo = static_cast<std::uint8_t>(q.grid[i]) & 0x0F;
      const std::uint8_t hi =
          i + 1 < n ? static_cast<std::uint8_t>(q.grid[i + 1]) & 0x0F : 0;
      w.pod<std::uint8_t>(static_cast<std::uint8_t>(lo | (hi << 4)));
    }
  }
  w.close();
}

QuantizedCodebook load_quantized(const std::string& path) {
  io::Reader r(path);
  r.expect_magic(kMagic, "quantized codebook");
  const auto version = r.pod<std::uint32_t>();
  if (version != 1) throw std::runtime_error("unsupported codebook version");
  QuantizedCodebook q;
  q.c = r.pod<std::uint64_t>();
  q.d = r.pod<std::uint64_t>();
  q.bits = r.pod<std::uint8_t>();
  check_bits(q.bits);
  q.step.resize(q.c);
  for (double& s : q.step) s = static_cast<double>(r.pod<float>());
  const std::size_t n = q.c * q.d;
  q.grid.resize(n);
  if (q.bits == 16) {
    for (std::size_t i = 0; i < n; ++i) q.grid[i] = r.pod<std::int16_t>();
  } else if (q.bits == 8) {
    for (std::size_t i = 0; i < n; ++i) q.grid[i] = r.pod<std::int8_t>();
  } else {
    auto sign_extend4 = [](std::uint8_t v) -> std::int32_t {
      return v >= 8 ? static_cast<std::int32_t>(v) - 16
                    : static_cast<std::int32_t>(v);
    };
    for (std::size_t i = 0; i < n; i += 2) {
      const auto byte = r.pod<std::uint8_t>();
      q.grid[i] = sign_extend4(byte & 0x0F);
      if (i + 1 < n) q.grid[i + 1] = sign_extend4((byte >> 4) & 0x0F);
    }
  }
  q.validate();
  return q;
}

}  // namespace lerg
