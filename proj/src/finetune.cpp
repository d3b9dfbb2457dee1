#include "lerg/finetune.hpp"

#include <string>

#include "lerg/error.hpp"
#include "train_core.hpp"

namespace lerg {

namespace {

void check_consistent(const Matrix& backbone, const std::vector<double>& step,
                      const AssignmentMatrix& s, const RetentionPlan& plan,
                      const RewiredGraph& rewired,
                      const PlaceholderCodebook& placeholder) {
  std::string errs;
  auto mismatch = [&](const std::string& what) {
    if (!errs.empty()) errs += "; ";
    errs += what;
  };
  if (backbone.rows != s.c) mismatch("codebook rows != assignment columns");
  if (step.size() != backbone.rows) mismatch("step length != codebook rows");
  if (plan.retained_mask.size() != s.n)
    mismatch("retention plan entity count != assignment entity count");
  if (rewired.adjacency.n_rows != s.n)
    mismatch("rewired graph size != assignment entity count");
  if (rewired.retained_mask != plan.retained_mask)
    mismatch("rewired graph retained bitmap != retention plan");
  if (placeholder.assignment.size() != plan.pruned.size())
    mismatch("placeholder assignment count != pruned entity count");
  if (placeholder.r > 0 && placeholder.d != backbone.cols)
    mismatch("placeholder dimension != codebook dimension");
  if (!errs.empty()) throw std::invalid_argument("inconsistent artifacts: " + errs);
}

// Retained x retained submatrix of the rewired adjacency, normalized from
// the submatrix's own degrees, plus the entity <-> row maps and fixed
// imputed rows for the pruned entities.
struct SubGraph {
  Csr norm_sub;
  Matrix imputed;
  detail::TrainGraph graph;
};

SubGraph build_subgraph(const RetentionPlan& plan, const RewiredGraph& rewired,
                        const PlaceholderCodebook& placeholder) {
  const std::size_t n = plan.retained_mask.size();
  std::vector<std::int64_t> entity_row(n, -1);
  for (std::size_t i = 0; i < plan.retained.size(); ++i)
    entity_row[plan.retained[i]] = static_cast<std::int64_t>(i);

  const Csr& a = rewired.adjacency;
  Csr sub(plan.m, plan.m);
  for (std::size_t i = 0; i < plan.retained.size(); ++i) {
    const std::uint32_t e = plan.retained[i];
    for (std::uint64_t k = a.row_offsets[e]; k < a.row_offsets[e + 1]; ++k) {
      const std::int64_t col = entity_row[a.col_indices[k]];
      if (col < 0) continue;
      sub.col_indices.push_back(static_cast<std::uint32_t>(col));
      sub.values.push_back(a.values[k]);
    }
    sub.row_offsets[i + 1] = sub.col_indices.size();
  }

  SubGraph out;
  out.norm_sub = normalize_symmetric(sub);
  out.imputed = impute_pruned(placeholder);

  out.graph.norm_adj = nullptr;  // wired by the caller after the move
  out.graph.norm_adj_t = out.norm_sub.transpose();
  out.graph.active_entities = plan.retained;
  out.graph.entity_row = std::move(entity_row);
  out.graph.imputed_row.assign(n, -1);
  for (std::size_t i = 0; i < plan.pruned.size(); ++i)
    out.graph.imputed_row[plan.pruned[i]] = static_cast<std::int64_t>(i);
  return out;
}

}  // namespace

FinetuneArtifacts finetune(Matrix backbone, std::vector<double> step,
                           const AssignmentMatrix& s, const RetentionPlan& plan,
                           const RewiredGraph& rewired,
                           const PlaceholderCodebook& placeholder,
                           const InteractionDataset& ds,
                           const DatasetSplit& split, const TrainConfig& cfg,
                           MetricsSink sink) {
  check_consistent(backbone, step, s, plan, rewired, placeholder);
  plan.validate();

  SubGraph sg = build_subgraph(plan, rewired, placeholder);
  sg.graph.norm_adj = &sg.norm_sub;
  sg.graph.imputed = &sg.imputed;

  detail::TrainResult r = detail::train_codebook(
      std::move(backbone), std::move(step), s, sg.graph, ds, split, cfg,
      std::move(sink));

  FinetuneArtifacts art;
  art.codebook = quantize(r.backbone, r.step, cfg.bits);
  art.backbone = std::move(r.backbone);
  art.step = std::move(r.step);
  return art;
}

Matrix assemble_inference_table(const Matrix& codebook,
                                const AssignmentMatrix& s,
                                const RetentionPlan& plan,
                                const RewiredGraph& rewired,
                                const PlaceholderCodebook& placeholder,
                                unsigned layers) {
  check_consistent(codebook,
                   std::vector<double>(codebook.rows, 1.0), s, plan, rewired,
                   placeholder);
  plan.validate();
  SubGraph sg = build_subgraph(plan, rewired, placeholder);
  sg.graph.norm_adj = &sg.norm_sub;
  sg.graph.imputed = &sg.imputed;
  return detail::assemble_table(codebook, s, sg.graph, layers);
}

}  // namespace lerg
