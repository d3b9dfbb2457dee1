#pragma once

#include <vector>

#include "lerg/assignment.hpp"
#include "lerg/matrix.hpp"
#include "lerg/placeholder.hpp"
#include "lerg/quantizer.hpp"
#include "lerg/rewiring.hpp"
#include "lerg/trainer.hpp"

namespace lerg {

struct FinetuneArtifacts {
  Matrix backbone;           // refined full-precision codebook
  std::vector<double> step;  // refined step vector
  QuantizedCodebook codebook;
};

/// Refines the pretrained codebook over the rewired graph: retained rows are
/// composed and propagated on the retained x retained submatrix (normalized
/// from its own degrees); pruned rows are fixed placeholder imputations that
/// contribute loss but no codebook gradient. Throws a validation error
/// listing every artifact-shape mismatch.
FinetuneArtifacts finetune(Matrix backbone, std::vector<double> step,
                           const AssignmentMatrix& s, const RetentionPlan& plan,
                           const RewiredGraph& rewired,
                           const PlaceholderCodebook& placeholder,
                           const InteractionDataset& ds,
                           const DatasetSplit& split, const TrainConfig& cfg,
                           MetricsSink sink = {});

/// Full N x d inference table: retained rows = propagated composed
/// embeddings, pruned rows = placeholder gathers.
Matrix assemble_inference_table(const Matrix& codebook,
                                const AssignmentMatrix& s,
                                const RetentionPlan& plan,
                                const RewiredGraph& rewired,
                                const PlaceholderCodebook& placeholder,
                                unsigned layers);

}  // namespace lerg
