#pragma once

#include <cstdint>

#include "lerg/csr.hpp"
#include "lerg/matrix.hpp"

namespace lerg {

/// LightGCN-style propagation: mean of H^(0..L) with H^(l+1) = A * H^(l).
/// Row-parallel sparse-dense multiply; L = 0 returns H0 unchanged.
Matrix propagate(const Csr& a, const Matrix& h0, unsigned layers);

/// Adjoint of propagate with respect to H0:
/// (1/(L+1)) * sum_l (A^T)^l * grad. Traverses the transposed structure.
Matrix propagate_backward(const Csr& a, const Matrix& grad, unsigned layers);

/// Same as propagate_backward with a caller-supplied transpose (avoids
/// re-transposing inside training loops).
Matrix propagate_backward_pre(const Csr& a_transposed, const Matrix& grad,
                              unsigned layers);

/// Multiply-accumulate count of one propagation pass:
/// layers * nnz(A) * d.
std::uint64_t count_macs(const Csr& a, std::size_t d, unsigned layers);

}  // namespace lerg
