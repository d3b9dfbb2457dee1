#pragma once

// Shared batch-gradient training loop for pretraining (full graph, all
// entities active) and fine-tuning (rewired retained submatrix, pruned
// entities served by fixed imputed rows). Not part of the public API.

#include <cstdint>
#include <vector>

#include "lerg/assignment.hpp"
#include "lerg/csr.hpp"
#include "lerg/dataset.hpp"
#include "lerg/matrix.hpp"
#include "lerg/trainer.hpp"

namespace lerg::detail {

struct TrainGraph {
  const Csr* norm_adj = nullptr;  // n_active x n_active, normalized
  Csr norm_adj_t;
  std::vector<std::uint32_t> active_entities;  // sub row -> entity id
  std::vector<std::int64_t> entity_row;        // entity -> sub row or -1
  const Matrix* imputed = nullptr;             // fixed rows for inactive
  std::vector<std::int64_t> imputed_row;       // entity -> imputed row or -1
};

TrainGraph full_graph(const Csr& norm_adj, std::size_t n);

struct TrainResult {
  Matrix backbone;
  std::vector<double> step;
  double best_val_ndcg20 = 0.0;
  std::size_t epochs_run = 0;
};

/// Runs up to cfg.max_epochs of BPR training; selection keeps the
/// best-validation-NDCG@20 parameters among post-update epochs. With
/// max_epochs = 0 the inputs are returned untouched.
TrainResult train_codebook(Matrix backbone, std::vector<double> step,
                           const AssignmentMatrix& assignment,
                           const TrainGraph& graph,
                           const InteractionDataset& ds,
                           const DatasetSplit& split, const TrainConfig& cfg,
                           MetricsSink sink);

/// Table over all N entities: propagated rows for active entities, imputed
/// rows for the rest (zero rows if no imputation is configured).
Matrix assemble_table(const Matrix& codebook,
                      const AssignmentMatrix& assignment,
                      const TrainGraph& graph, unsigned layers);

}  // namespace lerg::detail
