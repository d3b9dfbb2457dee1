#include "lerg/trainer.hpp"

#include <cmath>
#include <stdexcept>

#include "lerg/propagation.hpp"
#include "lerg/rng.hpp"
#include "train_core.hpp"

namespace lerg {

double bpr_loss(const std::vector<double>& pos_scores,
                const std::vector<double>& neg_scores, double lambda,
                double param_sq_norm) {
  require(pos_scores.size() == neg_scores.size(),
          "score lists must have equal length");
  double loss = 0.0;
  for (std::size_t i = 0; i < pos_scores.size(); ++i) {
    const double x = pos_scores[i] - neg_scores[i];
    loss += x > 0.0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
  }
  return loss + lambda * param_sq_norm;
}

double score(const Matrix& h, std::uint32_t user_entity,
             std::uint32_t item_entity) {
  require(user_entity < h.rows && item_entity < h.rows, "entity out of range");
  double acc = 0.0;
  const double* a = h.row(user_entity);
  const double* b = h.row(item_entity);
  for (std::size_t k = 0; k < h.cols; ++k) acc += a[k] * b[k];
  return acc;
}

AdamState::AdamState(std::size_t codebook_size, std::size_t step_size)
    : m_cb_(codebook_size, 0.0),
      v_cb_(codebook_size, 0.0),
      m_step_(step_size, 0.0),
      v_step_(step_size, 0.0) {}

void AdamState::update(Matrix& backbone, std::vector<double>& step,
                       const Matrix& grad_backbone,
                       const std::vector<double>& grad_step, double lr,
                       double weight_decay) {
  require(backbone.data.size() == m_cb_.size(), "backbone size mismatch");
  require(step.size() == m_step_.size(), "step size mismatch");
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));

  auto apply = [&](double* p, const double* g, double* m, double* v,
                   std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      p[i] -= lr * (m_hat / (std::sqrt(v_hat) + eps) + weight_decay * p[i]);
    }
  };
  apply(backbone.data.data(), grad_backbone.data.data(), m_cb_.data(),
        v_cb_.data(), backbone.data.size());
  apply(step.data(), grad_step.data(), m_step_.data(), v_step_.data(),
        step.size());
  for (double& s : step) s = std::max(s, 1e-8);
}

Matrix init_codebook(std::size_t c, std::size_t d, std::uint64_t seed) {
  Matrix e(c, d);
  const double a = std::sqrt(6.0 / static_cast<double>(c + d));
  Rng rng(seed);
  for (double& v : e.data) v = rng.uniform_real(-a, a);
  return e;
}

PretrainArtifacts pretrain(const InteractionDataset& ds,
                           const DatasetSplit& split, const Csr& norm_adj,
                           const AssignmentMatrix& assignment,
                           Matrix backbone0, std::vector<double> step0,
                           const TrainConfig& cfg, MetricsSink sink) {
  require(norm_adj.n_rows == ds.num_entities(),
          "graph must cover all entities");
  require(assignment.n == ds.num_entities(),
          "assignment must cover all entities");

  const detail::TrainGraph graph =
      detail::full_graph(norm_adj, ds.num_entities());
  detail::TrainResult r = detail::train_codebook(
      std::move(backbone0), std::move(step0), assignment, graph, ds, split,
      cfg, std::move(sink));

  PretrainArtifacts art;
  art.codebook = quantize(r.backbone, r.step, cfg.bits);
  // Propagated table induced by the stored (quantized) parameters.
  const Matrix deq = dequantize(art.codebook);
  art.h_pretrain = detail::assemble_table(deq, assignment, graph, cfg.layers);
  art.backbone = std::move(r.backbone);
  art.step = std::move(r.step);
  return art;
}

}  // namespace lerg
