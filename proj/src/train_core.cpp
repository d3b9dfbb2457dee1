#include "train_core.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "lerg/evaluation.hpp"
#include "lerg/kernels.hpp"
#include "lerg/propagation.hpp"
#include "lerg/rng.hpp"

namespace lerg::detail {

namespace {

struct Triplet {
  std::uint32_t user;  // entity id
  std::uint32_t pos;   // entity id
  std::uint32_t neg;   // entity id
};

std::vector<Triplet> build_triplets(const InteractionDataset& ds,
                                    const DatasetSplit& split) {
  require(split.negatives.size() == split.train.size(),
          "negatives must be sampled before training");
  std::vector<Triplet> out;
  out.reserve(split.train.size() *
              (split.negatives.empty() ? 1 : split.negatives.front().size()));
  for (std::size_t t = 0; t < split.train.size(); ++t) {
    const Pair& p = split.train[t];
    for (std::uint32_t neg : split.negatives[t])
      out.push_back({p.user, ds.item_entity(p.item), ds.item_entity(neg)});
  }
  return out;
}

double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
}

// -ln sigmoid(x), stable for both signs.
double softplus_neg(double x) {
  return x > 0.0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

}  // namespace

TrainGraph full_graph(const Csr& norm_adj, std::size_t n) {
  TrainGraph g;
  g.norm_adj = &norm_adj;
  g.norm_adj_t = norm_adj.transpose();
  g.active_entities.resize(n);
  g.entity_row.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.active_entities[i] = static_cast<std::uint32_t>(i);
    g.entity_row[i] = static_cast<std::int64_t>(i);
  }
  g.imputed_row.assign(n, -1);
  return g;
}

Matrix assemble_table(const Matrix& codebook,
                      const AssignmentMatrix& assignment,
                      const TrainGraph& graph, unsigned layers) {
  const Matrix h0 = infer_rows(assignment, codebook, graph.active_entities);
  const Matrix h_active = propagate(*graph.norm_adj, h0, layers);
  Matrix table(assignment.n, codebook.cols);
  for (std::size_t i = 0; i < graph.active_entities.size(); ++i) {
    const double* src = h_active.row(i);
    double* dst = table.row(graph.active_entities[i]);
    for (std::size_t k = 0; k < codebook.cols; ++k) dst[k] = src[k];
  }
  if (graph.imputed != nullptr) {
    for (std::size_t e = 0; e < assignment.n; ++e) {
      if (graph.imputed_row[e] < 0) continue;
      const double* src =
          graph.imputed->row(static_cast<std::size_t>(graph.imputed_row[e]));
      double* dst = table.row(e);
      for (std::size_t k = 0; k < codebook.cols; ++k) dst[k] = src[k];
    }
  }
  return table;
}

TrainResult train_codebook(Matrix backbone, std::vector<double> step,
                           const AssignmentMatrix& assignment,
                           const TrainGraph& graph,
                           const InteractionDataset& ds,
                           const DatasetSplit& split, const TrainConfig& cfg,
                           MetricsSink sink) {
  cfg.validate();
  const std::size_t d = backbone.cols;
  const unsigned layers = cfg.layers;

  TrainResult result;
  result.backbone = backbone;
  result.step = step;
  if (cfg.max_epochs == 0) return result;

  std::vector<Triplet> triplets = build_triplets(ds, split);
  require(!triplets.empty(), "no training triplets");

  AdamState adam(backbone.data.size(), step.size());
  Rng order_rng(cfg.seed);
  std::vector<std::size_t> order(triplets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  double best_ndcg = -1.0;
  std::size_t wait = 0;

  const std::size_t n_active = graph.active_entities.size();
  Matrix grad_h(n_active, d);
  Matrix grad_h0_direct(n_active, d);

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    order_rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t batches = 0;

    for (std::size_t at = 0; at < order.size(); at += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), at + cfg.batch_size);
      const double inv_b = 1.0 / static_cast<double>(end - at);

      const Matrix deq =
          fake_quantize(backbone, step, cfg.bits, RoundMode::nearest);
      const Matrix h0 = infer_rows(assignment, deq, graph.active_entities);
      const Matrix h = propagate(*graph.norm_adj, h0, layers);

      auto row_of = [&](std::uint32_t e) -> const double* {
        const std::int64_t r = graph.entity_row[e];
        if (r >= 0) return h.row(static_cast<std::size_t>(r));
        return graph.imputed->row(
            static_cast<std::size_t>(graph.imputed_row[e]));
      };

      grad_h.fill(0.0);
      grad_h0_direct.fill(0.0);
      double batch_loss = 0.0;

      for (std::size_t idx = at; idx < end; ++idx) {
        const Triplet& t = triplets[order[idx]];
        const double* hu = row_of(t.user);
        const double* hp = row_of(t.pos);
        const double* hn = row_of(t.neg);
        const double x = kern::dot(hu, hp, d) - kern::dot(hu, hn, d);
        batch_loss += softplus_neg(x) * inv_b;
        const double coeff = -sigmoid(-x) * inv_b;

        const std::int64_t ru = graph.entity_row[t.user];
        const std::int64_t rp = graph.entity_row[t.pos];
        const std::int64_t rn = graph.entity_row[t.neg];
        if (ru >= 0) {
          double* g = grad_h.row(static_cast<std::size_t>(ru));
          kern::axpy(coeff, hp, g, d);
          kern::axpy(-coeff, hn, g, d);
        }
        if (rp >= 0)
          kern::axpy(coeff, hu, grad_h.row(static_cast<std::size_t>(rp)), d);
        if (rn >= 0)
          kern::axpy(-coeff, hu, grad_h.row(static_cast<std::size_t>(rn)), d);

        // L2 over the composed input embeddings of the triplet's trainable
        // entities.
        if (cfg.l2_lambda > 0.0) {
          for (std::int64_t r : {ru, rp, rn}) {
            if (r < 0) continue;
            const double* e0 = h0.row(static_cast<std::size_t>(r));
            batch_loss +=
                cfg.l2_lambda * kern::dot(e0, e0, d) * inv_b;
            kern::axpy(2.0 * cfg.l2_lambda * inv_b, e0,
                       grad_h0_direct.row(static_cast<std::size_t>(r)), d);
          }
        }
      }

      if (!std::isfinite(batch_loss))
        throw std::runtime_error("training diverged: non-finite loss");
      epoch_loss += batch_loss;
      ++batches;

      Matrix grad_h0 =
          propagate_backward_pre(graph.norm_adj_t, grad_h, layers);
      for (std::size_t i = 0; i < grad_h0.data.size(); ++i)
        grad_h0.data[i] += grad_h0_direct.data[i];

      const Matrix grad_deq =
          infer_rows_adjoint(assignment, grad_h0, graph.active_entities, d);
      const QatGrads qg =
          qat_backward(grad_deq, backbone, step, cfg.bits, RoundMode::nearest,
                       cfg.lsq_grad_scale);
      adam.update(backbone, step, qg.codebook, qg.step, cfg.learning_rate,
                  cfg.weight_decay);
    }

    // Validation on the assembled inference table.
    const Matrix deq =
        fake_quantize(backbone, step, cfg.bits, RoundMode::nearest);
    const Matrix table = assemble_table(deq, assignment, graph, layers);
    const MetricsReport rep =
        evaluate(table, ds, split.train, split.valid, {10, 20});

    const auto t1 = std::chrono::steady_clock::now();
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = batches > 0 ? epoch_loss / static_cast<double>(batches) : 0.0;
    rec.recall10 = rep.at.at(10).recall;
    rec.ndcg10 = rep.at.at(10).ndcg;
    rec.recall20 = rep.at.at(20).recall;
    rec.ndcg20 = rep.at.at(20).ndcg;
    rec.seconds = std::chrono::duration<double>(t1 - t0).count();
    if (sink) sink(rec);

    result.epochs_run = epoch;
    if (split.valid.empty()) {
      // No validation data: keep the latest parameters, no early stop.
      result.backbone = backbone;
      result.step = step;
      continue;
    }
    if (rec.ndcg20 > best_ndcg) {
      best_ndcg = rec.ndcg20;
      result.backbone = backbone;
      result.step = step;
      result.best_val_ndcg20 = best_ndcg;
      wait = 0;
    } else if (++wait >= cfg.patience) {
      break;
    }
  }
  return result;
}

}  // namespace lerg::detail
