#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lerg/csr.hpp"
#include "lerg/matrix.hpp"

namespace lerg {

/// Which entities keep broadcasting signals after pruning.
struct RetentionPlan {
  std::size_t m = 0;                        // |retained|
  std::vector<std::uint8_t> retained_mask;  // per entity, 1 = retained
  std::vector<std::uint32_t> retained;      // ascending entity IDs
  std::vector<std::uint32_t> pruned;        // ascending entity IDs
  std::vector<double> scores;

  void validate() const;
};

/// Directed graph after column pruning and multi-hop backfill.
struct RewiredGraph {
  Csr adjacency;
  std::vector<std::uint8_t> retained_mask;
  /// Per entity: hop count used to backfill the row (0 = row untouched).
  std::vector<std::uint32_t> fill_hops;
  /// Entities whose rows stayed all-zero after the deepest scan; they are
  /// served purely by placeholder imputation downstream.
  std::vector<std::uint32_t> unrecovered;
};

/// score[j] = sum_k (H H^T)[j,k], computed as <H[j], g> with g = sum_k H[k].
/// The N x N similarity matrix is never materialized.
std::vector<double> contribution_scores(const Matrix& h);

/// Keeps the m highest-scoring entities (ties broken by smaller entity ID).
/// This is the exact optimum of the relaxed selection problem, so the
/// rounding boundary `o` is a no-op on it; the parameter is kept for
/// interface fidelity.
RetentionPlan select_retained(const std::vector<double>& scores, std::size_t m,
                              double o = 0.5);

/// Zeroes every column indexed by a pruned entity. Rows are untouched, so
/// the result is directed: pruned entities stop broadcasting but keep
/// receiving.
Csr prune_columns(const Csr& a, const std::vector<std::uint32_t>& pruned);

/// Column-prunes `a`, then for each entity whose row went all-zero scans
/// hop counts t = 2..t_max for the nearest retained multi-hop neighbors and
/// rewrites the row with unit weights over them. Rows still empty after
/// t_max are reported in `unrecovered`.
RewiredGraph rewire(const Csr& a, const RetentionPlan& plan,
                    std::uint32_t t_max = 4);

void save_rewired(const std::string& path, const RewiredGraph& g);
RewiredGraph load_rewired(const std::string& path);

}  // namespace lerg
