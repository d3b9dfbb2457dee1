#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lerg/matrix.hpp"

namespace lerg {

/// Small centroid set imputing pruned entities' inference embeddings.
struct PlaceholderCodebook {
  std::size_t r = 0;
  std::size_t d = 0;
  Matrix centroids;                        // r x d
  std::vector<std::uint32_t> assignment;   // per pruned entity, index < r

  void validate() const;
};

/// Lloyd's iterations from k-means++ seeding over the pruned entities'
/// propagated embeddings. Converges when assignments stop changing or after
/// max_iters; deterministic under seed. Empty clusters are re-seeded from
/// the point farthest from its centroid. Warns on stderr when r exceeds a
/// tenth of the point count.
PlaceholderCodebook cluster_pruned(const Matrix& h_prune, std::size_t r,
                                   std::uint64_t seed,
                                   std::size_t max_iters = 100);

/// Row p of the result = centroids[assignment[p]] (pure gather).
Matrix impute_pruned(const PlaceholderCodebook& p);

void save_placeholder(const std::string& path, const PlaceholderCodebook& p);
PlaceholderCodebook load_placeholder(const std::string& path);

}  // namespace lerg
