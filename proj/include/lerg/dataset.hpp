#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lerg/error.hpp"

namespace lerg {

struct Pair {
  std::uint32_t user;
  std::uint32_t item;
  bool operator==(const Pair&) const = default;
};

/// Deduplicated (user, item) interactions with dense contiguous IDs.
/// Entity ID space: users occupy [0, num_users), item i maps to
/// num_users + i, so N = num_users + num_items.
struct InteractionDataset {
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  std::vector<Pair> pairs;

  std::size_t num_entities() const { return num_users + num_items; }
  std::uint32_t item_entity(std::uint32_t item) const {
    return static_cast<std::uint32_t>(num_users) + item;
  }
};

enum class PairFormat { tsv_pairs, csv_pairs };

/// Parses one interaction per line: user token, item token, separated by tab
/// (tsv) or comma (csv). Lines beginning with '#' are skipped. Tokens are
/// mapped to dense IDs in first-appearance order; duplicate pairs are
/// dropped.
InteractionDataset load_interactions(const std::string& path, PairFormat fmt);

struct SplitRatios {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;
};

struct DatasetSplit {
  std::vector<Pair> train;
  std::vector<Pair> valid;
  std::vector<Pair> test;
  /// Per-train-pair negative item IDs, parallel to `train`. Filled by
  /// sample_negatives.
  std::vector<std::vector<std::uint32_t>> negatives;
};

/// Per-user stratified random split, deterministic under seed. Users with
/// fewer than 3 interactions keep everything in train.
DatasetSplit split_dataset(const InteractionDataset& ds, SplitRatios ratios,
                           std::uint64_t seed);

/// Draws k uniform negatives per train pair from the items the user never
/// interacted with anywhere in the observed set.
void sample_negatives(DatasetSplit& split, const InteractionDataset& ds,
                      std::size_t k, std::uint64_t seed);

void save_split(const std::string& path, const InteractionDataset& ds,
                const DatasetSplit& split);
void load_split(const std::string& path, InteractionDataset& ds,
                DatasetSplit& split);

}  // namespace lerg
