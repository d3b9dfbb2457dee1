#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lerg/matrix.hpp"
#include "lerg/partition.hpp"

namespace lerg {

/// Sparse entity-to-meta-embedding map with exactly two logical nonzeros per
/// row: the anchor (weight w_star) and one auxiliary (weight 1 - w_star).
/// Stored structurally as two index arrays plus one shared scalar weight;
/// frozen after initialization.
struct AssignmentMatrix {
  std::size_t n = 0;  // entities
  std::size_t c = 0;  // meta-embeddings
  double w_star = 0.9;
  std::vector<std::uint32_t> anchor_index;
  std::vector<std::uint32_t> aux_index;

  void validate() const;
};

/// Anchor = partition label; auxiliary drawn uniformly from the other
/// meta-embeddings. Deterministic under seed.
AssignmentMatrix init_assignment(const PartitionLabels& parts, std::size_t c,
                                 double w_star, std::uint64_t seed);

/// Row p of the result = w_star * E[anchor[p]] + (1 - w_star) * E[aux[p]].
/// Sparse gather-scale-add; the c-column product is never materialized.
Matrix infer_full_table(const AssignmentMatrix& s, const Matrix& codebook);

/// Same, restricted to a subset of entity rows (order preserved).
Matrix infer_rows(const AssignmentMatrix& s, const Matrix& codebook,
                  const std::vector<std::uint32_t>& entities);

/// Adjoint of infer_rows: scatters per-row gradients back onto the codebook.
/// grad_rows row i corresponds to entities[i].
Matrix infer_rows_adjoint(const AssignmentMatrix& s, const Matrix& grad_rows,
                          const std::vector<std::uint32_t>& entities,
                          std::size_t d);

void save_assignment(const std::string& path, const AssignmentMatrix& s);
AssignmentMatrix load_assignment(const std::string& path);

}  // namespace lerg
