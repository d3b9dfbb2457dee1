#pragma once

#include <cstdint>

#include "lerg/dataset.hpp"

namespace lerg {

struct SyntheticSpec {
  std::size_t num_users = 700;
  std::size_t num_items = 1300;
  std::size_t communities = 16;
  /// Mean interactions per user (actual counts jitter around this).
  std::size_t interactions_per_user = 28;
  /// Probability that an interaction stays inside the user's community.
  double intra_prob = 0.9;
  std::uint64_t seed = 7;
};

/// Bipartite interaction dataset with planted user/item communities.
/// Deterministic under the spec seed. Users and items are spread evenly
/// across communities; most of a user's interactions target items of the
/// same community.
InteractionDataset make_synthetic(const SyntheticSpec& spec);

}  // namespace lerg
