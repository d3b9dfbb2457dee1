#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lerg/dataset.hpp"
#include "lerg/matrix.hpp"
#include "lerg/quantizer.hpp"

namespace lerg {

/// Full-catalog ranking for one user: every item not in `exclude_items`,
/// ordered by descending affinity score (dot product of propagated rows),
/// ties broken by ascending item ID. `top_n` = 0 returns the full ranking.
std::vector<std::uint32_t> rank_items(
    const Matrix& h, std::uint32_t user, std::size_t num_users,
    std::size_t num_items, const std::vector<std::uint32_t>& exclude_items,
    std::size_t top_n = 0);

double recall_at_n(const std::vector<std::uint32_t>& ranked,
                   const std::vector<std::uint32_t>& relevant, std::size_t n);

double ndcg_at_n(const std::vector<std::uint32_t>& ranked,
                 const std::vector<std::uint32_t>& relevant, std::size_t n);

struct MetricValues {
  double recall = 0.0;
  double ndcg = 0.0;
};

struct MetricsReport {
  std::map<int, MetricValues> at;  // cutoff -> user-mean metrics
  std::size_t evaluated_users = 0;
  StorageReport storage;
  std::uint64_t macs_per_layer = 0;
};

/// Budget accounting attached to a metrics report.
struct BudgetInfo {
  std::size_t c = 0;
  std::size_t d = 0;
  int bits = 16;
  std::size_t r = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t graph_nnz = 0;
};

/// User-mean Recall@N / NDCG@N over users with a nonempty relevant set.
/// `relevant` comes from `eval_pairs` (validation or test); training items
/// are excluded from each user's candidate list.
MetricsReport evaluate(const Matrix& h, const InteractionDataset& ds,
                       const std::vector<Pair>& train_pairs,
                       const std::vector<Pair>& eval_pairs,
                       const std::vector<int>& n_list,
                       const BudgetInfo& budget = {});

std::string report_to_json(const MetricsReport& report,
                           const std::string& dataset_name,
                           std::uint64_t config_hash, double seconds);

}  // namespace lerg
