#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lerg/dataset.hpp"

namespace lerg {

/// Pipeline configuration, loaded from a plain-text `key = value` file with
/// [data], [model], [train], [rewire], [finetune] and [eval] sections.
/// Unknown sections or keys are errors naming the offender.
struct Config {
  // [data]
  std::string data_path;
  PairFormat data_format = PairFormat::tsv_pairs;
  std::string dataset_name = "dataset";
  double train_ratio = 0.8;
  double valid_ratio = 0.1;
  double test_ratio = 0.1;
  std::size_t negatives = 5;
  std::uint64_t split_seed = 7;

  // [model]
  std::size_t c = 2000;
  std::size_t d = 128;
  int bits = 16;
  double w_star = 0.9;
  unsigned layers = 4;
  double balance_epsilon = 0.1;
  std::uint64_t partition_seed = 11;
  std::string partition_labels;  // optional external label file

  // [train]
  double learning_rate = 1e-3;
  double weight_decay = 1e-5;
  double lambda = 5e-4;
  std::size_t batch_size = 8192;
  std::size_t max_epochs = 200;
  std::size_t patience = 10;
  std::uint64_t train_seed = 42;
  bool lsq_grad_scale = false;

  // [rewire]
  std::vector<double> retention_ratio = {1.0};
  unsigned t_max = 4;
  double rounding_boundary = 0.5;
  std::size_t placeholder_r = 500;
  std::uint64_t cluster_seed = 13;

  // [finetune]
  double finetune_learning_rate = 1e-3;
  std::size_t finetune_max_epochs = 200;
  std::size_t finetune_patience = 5;
  std::uint64_t finetune_seed = 42;

  // [eval]
  std::vector<int> eval_n = {10, 20};

  void validate() const;
};

Config load_config(const std::string& path);

/// Canonical text rendering; two configs with equal renderings behave
/// identically.
std::string config_to_string(const Config& cfg);

/// FNV-1a over the canonical rendering.
std::uint64_t config_hash(const Config& cfg);

}  // namespace lerg
