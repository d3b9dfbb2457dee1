#pragma once

#include <cstdint>
#include <vector>

#include "lerg/dataset.hpp"

namespace lerg {

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row.
struct Csr {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::uint64_t> row_offsets;  // length n_rows + 1
  std::vector<std::uint32_t> col_indices;
  std::vector<double> values;

  Csr() = default;
  Csr(std::size_t r, std::size_t c)
      : n_rows(r), n_cols(c), row_offsets(r + 1, 0) {}

  std::size_t nnz() const { return col_indices.size(); }
  std::size_t row_nnz(std::size_t i) const {
    return static_cast<std::size_t>(row_offsets[i + 1] - row_offsets[i]);
  }

  /// Throws std::invalid_argument when a structural invariant is broken.
  void validate() const;

  Csr transpose() const;

  /// Builds from unsorted (row, col, value) triples; duplicates are an error.
  static Csr from_triples(std::size_t n_rows, std::size_t n_cols,
                          std::vector<std::uint32_t> rows,
                          std::vector<std::uint32_t> cols,
                          std::vector<double> vals);
};

/// N x N symmetric binary adjacency with the bipartite block layout:
/// A[u, num_users + i] = A[num_users + i, u] = 1 for every pair.
Csr build_adjacency(const InteractionDataset& ds);

/// Replaces each nonzero A[j,k] by A[j,k] / sqrt(rowsum(j) * colsum(k)).
/// Zero-degree rows/columns are guarded (entries left untouched cannot
/// exist in them). Works for both the symmetric full graph and the directed
/// rewired graph.
Csr normalize_symmetric(const Csr& a);

/// Entities reachable from j within t hops (excluding j itself), computed by
/// breadth-limited traversal. Returned sorted ascending.
std::vector<std::uint32_t> multi_hop_row(const Csr& a, std::uint32_t j,
                                         std::uint32_t t);

}  // namespace lerg
