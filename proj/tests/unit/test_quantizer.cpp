#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "helpers.hpp"
#include "lerg/quantizer.hpp"

using namespace lerg;

TEST_CASE("grid bounds and scalar quantization cases") {
  QuantizedCodebook q16;
  q16.bits = 16;
  CHECK(q16.q_min() == -32768);
  CHECK(q16.q_max() == 32767);

  Matrix e(1, 1);
  e.at(0, 0) = 1.26;
  const auto q = quantize(e, {0.5}, 8);
  CHECK(q.grid[0] == 3);  // round(2.52)

  e.at(0, 0) = 1e6;
  CHECK(quantize(e, {1.0}, 8).grid[0] == 127);

  e.at(0, 0) = -1e6;
  CHECK(quantize(e, {1.0}, 8).grid[0] == -128);

  CHECK_THROWS(quantize(e, {0.0}, 8));
  CHECK_THROWS(quantize(e, {1.0}, 5));
}

TEST_CASE("dequantize scalar cases") {
  QuantizedCodebook q;
  q.c = 1;
  q.d = 2;
  q.bits = 8;
  q.grid = {3, 0};
  q.step = {0.5};
  const Matrix e = dequantize(q);
  CHECK(e.at(0, 0) == doctest::Approx(1.5));
  CHECK(e.at(0, 1) == 0.0);
}

TEST_CASE("roundtrip bound over random codebooks and all bit widths") {
  for (int bits : {4, 8, 16}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const std::size_t c = 6, d = 9;
      const auto e = test::random_matrix(c, d, seed, -3.0, 3.0);
      Rng rng(seed + 40);
      std::vector<double> step(c);
      for (double& s : step) s = rng.uniform_real(0.05, 1.5);
      const Matrix back = dequantize(quantize(e, step, bits));
      const double qmax = (1 << (bits - 1)) - 1;
      const double qmin = -(1 << (bits - 1));
      for (std::size_t j = 0; j < c; ++j)
        for (std::size_t k = 0; k < d; ++k) {
          const double z = e.at(j, k) / step[j];
          if (z < qmin || z > qmax) continue;  // in-range entries only
          CHECK(std::abs(back.at(j, k) - e.at(j, k)) <= step[j] / 2 + 1e-12);
        }
    }
  }
}

TEST_CASE("quantize is monotone per scalar") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix e(1, 1);
    const double a = rng.uniform_real(-200.0, 200.0);
    const double b = rng.uniform_real(-200.0, 200.0);
    const double s = rng.uniform_real(0.01, 2.0);
    e.at(0, 0) = std::min(a, b);
    const auto qa = quantize(e, {s}, 8).grid[0];
    e.at(0, 0) = std::max(a, b);
    const auto qb = quantize(e, {s}, 8).grid[0];
    CHECK(qa <= qb);
  }
}

TEST_CASE("fake_quantize agrees with quantize-then-dequantize") {
  const auto e = test::random_matrix(4, 6, 9, -2.0, 2.0);
  const std::vector<double> step(4, 0.3);
  const Matrix a = fake_quantize(e, step, 8, RoundMode::nearest);
  const Matrix b = dequantize(quantize(e, step, 8));
  for (std::size_t i = 0; i < a.data.size(); ++i) CHECK(a.data[i] == b.data[i]);
}

TEST_CASE("straight-through backward scalar cases") {
  Matrix e(1, 3);
  e.at(0, 0) = 2.0;    // z = 2, a lattice point
  e.at(0, 1) = 2.52;   // z = 2.52 in-range
  e.at(0, 2) = -500.0; // z far below q_min for b = 8
  Matrix g(1, 3);
  g.fill(1.0);
  const auto grads = qat_backward(g, e, {1.0}, 8);
  CHECK(grads.codebook.at(0, 0) == 1.0);
  CHECK(grads.codebook.at(0, 1) == 1.0);
  CHECK(grads.codebook.at(0, 2) == 0.0);
  // per-entry step contributions: 0, 0.48, -128
  CHECK(grads.step[0] == doctest::Approx(0.0 + 0.48 - 128.0));

  // All lattice points: zero step gradient, passthrough codebook gradient.
  Matrix lat(1, 2);
  lat.at(0, 0) = 1.0;
  lat.at(0, 1) = -3.0;
  Matrix gl(1, 2);
  gl.at(0, 0) = 0.7;
  gl.at(0, 1) = -0.2;
  const auto gr = qat_backward(gl, lat, {1.0}, 8);
  CHECK(gr.step[0] == 0.0);
  CHECK(gr.codebook.at(0, 0) == 0.7);
  CHECK(gr.codebook.at(0, 1) == -0.2);
}

TEST_CASE("surrogate gradients match finite differences") {
  // Clip-and-scale surrogate (round = identity): includes clipped entries so
  // both the passthrough and the saturation branch of the step gradient are
  // exercised.
  const std::size_t c = 3, d = 4;
  const int bits = 4;  // narrow range so clipping actually happens
  auto e = test::random_matrix(c, d, 11, -4.0, 4.0);
  std::vector<double> step = {0.3, 0.5, 0.9};

  auto loss = [&](const Matrix& ee, const std::vector<double>& ss) {
    const Matrix out = fake_quantize(ee, ss, bits, RoundMode::identity);
    double acc = 0.0;
    for (std::size_t i = 0; i < out.data.size(); ++i)
      acc += std::sin(static_cast<double>(i) + 1.0) * out.data[i];
    return acc;
  };

  Matrix grad_out(c, d);
  for (std::size_t i = 0; i < grad_out.data.size(); ++i)
    grad_out.data[i] = std::sin(static_cast<double>(i) + 1.0);
  const auto grads =
      qat_backward(grad_out, e, step, bits, RoundMode::identity);

  const double h = 1e-6;
  for (std::size_t i = 0; i < e.data.size(); ++i) {
    Matrix lo = e, hi = e;
    lo.data[i] -= h;
    hi.data[i] += h;
    const double fd = (loss(hi, step) - loss(lo, step)) / (2 * h);
    CHECK(grads.codebook.data[i] == doctest::Approx(fd).epsilon(1e-4));
  }
  for (std::size_t j = 0; j < c; ++j) {
    auto lo = step, hi = step;
    lo[j] -= h;
    hi[j] += h;
    const double fd = (loss(e, hi) - loss(e, lo)) / (2 * h);
    CHECK(grads.step[j] == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("independent oracle for the nearest-rounding step gradient") {
  // Re-derives the step-gradient rule entry by entry in test code.
  const auto e = test::random_matrix(4, 5, 19, -3.0, 3.0);
  const std::vector<double> step = {0.2, 0.4, 0.6, 0.8};
  const auto g = test::random_matrix(4, 5, 23);
  const auto grads = qat_backward(g, e, step, 4);
  for (std::size_t j = 0; j < 4; ++j) {
    double want = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
      const double z = e.at(j, k) / step[j];
      double contrib;
      if (z < -8.0) contrib = -8.0;
      else if (z > 7.0) contrib = 7.0;
      else contrib = std::round(z) - z;
      want += g.at(j, k) * contrib;
    }
    CHECK(grads.step[j] == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("optional gradient scale flag") {
  const auto e = test::random_matrix(2, 3, 3, -2.0, 2.0);
  const std::vector<double> step = {0.5, 0.5};
  Matrix g(2, 3);
  g.fill(1.0);
  const auto plain = qat_backward(g, e, step, 8, RoundMode::nearest, false);
  const auto scaled = qat_backward(g, e, step, 8, RoundMode::nearest, true);
  const double factor = 1.0 / std::sqrt(2.0 * 3.0 * 127.0);
  for (std::size_t j = 0; j < 2; ++j)
    CHECK(scaled.step[j] == doctest::Approx(plain.step[j] * factor));
}

TEST_CASE("step initialization") {
  Matrix e(1, 4);
  e.at(0, 0) = 1.0;
  e.at(0, 1) = -1.0;
  e.at(0, 2) = 2.0;
  e.at(0, 3) = -2.0;
  const auto step = init_step(e, 16);
  CHECK(step[0] == doctest::Approx(2.0 * 1.5 / std::sqrt(32767.0)));
  Matrix zero(2, 3);
  for (double s : init_step(zero, 8)) CHECK(s > 0.0);
}

TEST_CASE("storage accounting") {
  CHECK(storage_bytes(2000, 128, 16, 0, 0, 0).codebook_bytes == 520000);

  // Yelp-scale defaults land within 10% of 1.76 MB.
  const std::size_t n = 116198;
  const auto m = static_cast<std::size_t>(0.7 * n);
  const auto rep = storage_bytes(2000, 128, 16, 500, n, m);
  CHECK(rep.assignment_bytes == 8 * n);
  const double mb = static_cast<double>(rep.total_bytes) / (1024.0 * 1024.0);
  CHECK(mb == doctest::Approx(1.76).epsilon(0.10));

  // The formula collapses to full-precision bytes at b = 32.
  const auto fp = storage_bytes(100, 16, 32, 0, 0, 0);
  CHECK(fp.codebook_bytes == 100 * 16 * 4 + 4 * 100);
}

TEST_CASE("quantized codebook roundtrips through disk at every width") {
  for (int bits : {4, 8, 16}) {
    const auto e = test::random_matrix(5, 7, 31 + bits, -3.0, 3.0);
    std::vector<double> step(5, 0.25);
    const auto q = quantize(e, step, bits);
    save_quantized("lerg_test_q.bin", q);
    const auto back = load_quantized("lerg_test_q.bin");
    std::remove("lerg_test_q.bin");
    CHECK(back.c == q.c);
    CHECK(back.d == q.d);
    CHECK(back.bits == q.bits);
    CHECK(back.grid == q.grid);
    for (std::size_t j = 0; j < q.c; ++j)
      CHECK(back.step[j] == doctest::Approx(q.step[j]).epsilon(1e-6));
  }
}
