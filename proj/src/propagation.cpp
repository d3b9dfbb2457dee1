#include "lerg/propagation.hpp"

#include "lerg/kernels.hpp"
#include "lerg/parallel.hpp"

namespace lerg {

namespace {

// out = A * in, row-parallel.
void spmm(const Csr& a, const Matrix& in, Matrix& out) {
  const std::size_t d = in.cols;
  parallel_for(a.n_rows, [&](std::size_t b, std::size_t e) {
    for (std::size_t r = b; r < e; ++r) {
      double* dst = out.row(r);
      for (std::size_t k = 0; k < d; ++k) dst[k] = 0.0;
      for (std::uint64_t k = a.row_offsets[r]; k < a.row_offsets[r + 1]; ++k)
        kern::axpy(a.values[k], in.row(a.col_indices[k]), dst, d);
    }
  });
}

Matrix layer_mean(const Csr& a, const Matrix& h0, unsigned layers) {
  require(a.n_rows == h0.rows, "adjacency and embedding row counts differ");
  require(a.n_cols == h0.rows, "adjacency must be square over the rows");
  Matrix sum = h0;
  if (layers == 0) return sum;
  Matrix cur = h0;
  Matrix next(h0.rows, h0.cols);
  for (unsigned l = 0; l < layers; ++l) {
    spmm(a, cur, next);
    for (std::size_t i = 0; i < sum.data.size(); ++i) sum.data[i] += next.data[i];
    std::swap(cur, next);
  }
  kern::scale(1.0 / static_cast<double>(layers + 1), sum.data.data(),
              sum.data.size());
  return sum;
}

}  // namespace

Matrix propagate(const Csr& a, const Matrix& h0, unsigned layers) {
  return layer_mean(a, h0, layers);
}

Matrix propagate_backward(const Csr& a, const Matrix& grad, unsigned layers) {
  if (layers == 0) return grad;
  return layer_mean(a.transpose(), grad, layers);
}

Matrix propagate_backward_pre(const Csr& a_transposed, const Matrix& grad,
                              unsigned layers) {
  return layer_mean(a_transposed, grad, layers);
}

std::uint64_t count_macs(const Csr& a, std::size_t d, unsigned layers) {
  return static_cast<std::uint64_t>(layers) * a.nnz() * d;
}

}  // namespace lerg
