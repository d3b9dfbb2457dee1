#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "lerg/assignment.hpp"
#include "lerg/csr.hpp"
#include "lerg/dataset.hpp"
#include "lerg/matrix.hpp"
#include "lerg/quantizer.hpp"

namespace lerg {

struct TrainConfig {
  double learning_rate = 1e-3;
  double weight_decay = 1e-5;
  double l2_lambda = 5e-4;
  std::size_t batch_size = 8192;
  std::size_t max_epochs = 200;
  std::size_t patience = 10;  // early-stop epochs on validation NDCG@20
  std::uint64_t seed = 42;
  unsigned layers = 4;
  int bits = 16;
  bool lsq_grad_scale = false;

  void validate() const {
    require(learning_rate > 0 && weight_decay >= 0 && l2_lambda >= 0,
            "rates must be positive");
    require(patience >= 1, "patience must be >= 1");
    require(batch_size >= 1, "batch size must be >= 1");
  }
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double recall10 = 0.0, ndcg10 = 0.0;
  double recall20 = 0.0, ndcg20 = 0.0;
  double seconds = 0.0;
};

using MetricsSink = std::function<void(const EpochRecord&)>;

/// Sum of -ln sigmoid(pos - neg) over triplets plus lambda * param_sq_norm.
/// Computed in log-sum-exp form; never overflows.
double bpr_loss(const std::vector<double>& pos_scores,
                const std::vector<double>& neg_scores, double lambda,
                double param_sq_norm);

/// Affinity score: dot product of the propagated rows of user u and item
/// entity i.
double score(const Matrix& h, std::uint32_t user_entity,
             std::uint32_t item_entity);

/// Adam with decoupled weight decay over the codebook backbone and the step
/// vector. Exposed for direct testing.
class AdamState {
 public:
  AdamState(std::size_t codebook_size, std::size_t step_size);

  /// One update: p -= lr * (m_hat / (sqrt(v_hat) + eps) + wd * p).
  /// Step entries are clamped to stay positive.
  void update(Matrix& backbone, std::vector<double>& step,
              const Matrix& grad_backbone, const std::vector<double>& grad_step,
              double lr, double weight_decay);

 private:
  std::vector<double> m_cb_, v_cb_, m_step_, v_step_;
  std::uint64_t t_ = 0;
};

struct PretrainArtifacts {
  Matrix backbone;           // full-precision codebook after training
  std::vector<double> step;  // trained step vector
  QuantizedCodebook codebook;
  Matrix h_pretrain;  // full-graph propagated table at the selected epoch
};

/// Uniform codebook init in [-a, a] with a = sqrt(6 / (c + d)).
Matrix init_codebook(std::size_t c, std::size_t d, std::uint64_t seed);

/// BPR pretraining of the quantized compositional codebook over the full
/// normalized graph. Early-stops on validation NDCG@20; returns the
/// best-validation parameters and the propagated table they induce.
PretrainArtifacts pretrain(const InteractionDataset& ds,
                           const DatasetSplit& split, const Csr& norm_adj,
                           const AssignmentMatrix& assignment,
                           Matrix backbone0, std::vector<double> step0,
                           const TrainConfig& cfg, MetricsSink sink = {});

}  // namespace lerg
