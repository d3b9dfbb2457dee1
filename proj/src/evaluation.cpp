#include "lerg/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "lerg/kernels.hpp"
#include "lerg/parallel.hpp"

#include "json.hpp"

namespace lerg {

std::vector<std::uint32_t> rank_items(
    const Matrix& h, std::uint32_t user, std::size_t num_users,
    std::size_t num_items, const std::vector<std::uint32_t>& exclude_items,
    std::size_t top_n) {
  require(user < num_users, "unknown user");
  require(h.rows == num_users + num_items, "table does not cover all entities");
  std::unordered_set<std::uint32_t> excluded(exclude_items.begin(),
                                             exclude_items.end());
  const double* hu = h.row(user);
  std::vector<std::pair<double, std::uint32_t>> scored;
  scored.reserve(num_items - std::min(num_items, excluded.size()));
  for (std::uint32_t i = 0; i < num_items; ++i) {
    if (excluded.count(i)) continue;
    scored.emplace_back(kern::dot(hu, h.row(num_users + i), h.cols), i);
  }
  auto better = [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  };
  if (top_n > 0 && top_n < scored.size()) {
    std::partial_sort(scored.begin(), scored.begin() + top_n, scored.end(),
                      better);
    scored.resize(top_n);
  } else {
    std::sort(scored.begin(), scored.end(), better);
  }
  std::vector<std::uint32_t> ranked(scored.size());
  for (std::size_t k = 0; k < scored.size(); ++k) ranked[k] = scored[k].second;
  return ranked;
}

double recall_at_n(const std::vector<std::uint32_t>& ranked,
                   const std::vector<std::uint32_t>& relevant, std::size_t n) {
  require(n >= 1, "cutoff must be >= 1");
  if (relevant.empty()) return 0.0;
  std::unordered_set<std::uint32_t> rel(relevant.begin(), relevant.end());
  std::size_t hits = 0;
  for (std::size_t p = 0; p < ranked.size() && p < n; ++p)
    if (rel.count(ranked[p])) ++hits;
  return static_cast<double>(hits) / static_cast<double>(rel.size());
}

double ndcg_at_n(const std::vector<std::uint32_t>& ranked,
                 const std::vector<std::uint32_t>& relevant, std::size_t n) {
  require(n >= 1, "cutoff must be >= 1");
  if (relevant.empty()) return 0.0;
  std::unordered_set<std::uint32_t> rel(relevant.begin(), relevant.end());
  double dcg = 0.0;
  for (std::size_t p = 0; p < ranked.size() && p < n; ++p)
    if (rel.count(ranked[p])) dcg += 1.0 / std::log2(static_cast<double>(p) + 2.0);
  double idcg = 0.0;
  const std::size_t ideal = std::min(n, rel.size());
  for (std::size_t p = 0; p < ideal; ++p)
    idcg += 1.0 / std::log2(static_cast<double>(p) + 2.0);
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

MetricsReport evaluate(const Matrix& h, const InteractionDataset& ds,
                       const std::vector<Pair>& train_pairs,
                       const std::vector<Pair>& eval_pairs,
                       const std::vector<int>& n_list,
                       const BudgetInfo& budget) {
  std::vector<std::vector<std::uint32_t>> train_items(ds.num_users);
  for (const Pair& p : train_pairs) train_items[p.user].push_back(p.item);
  std::vector<std::vector<std::uint32_t>> relevant(ds.num_users);
  for (const Pair& p : eval_pairs) relevant[p.user].push_back(p.item);

  std::size_t max_n = 1;
  for (int n : n_list) max_n = std::max<std::size_t>(max_n, n);

  MetricsReport report;
  std::vector<std::uint32_t> users;
  for (std::uint32_t u = 0; u < ds.num_users; ++u)
    if (!relevant[u].empty()) users.push_back(u);

  // Per-user partial sums; user slots are disjoint write targets.
  std::vector<std::vector<double>> recall_sum(n_list.size()),
      ndcg_sum(n_list.size());
  for (auto& v : recall_sum) v.assign(users.size(), 0.0);
  for (auto& v : ndcg_sum) v.assign(users.size(), 0.0);

  parallel_for(users.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t idx = b; idx < e; ++idx) {
      const std::uint32_t u = users[idx];
      const auto ranked =
          rank_items(h, u, ds.num_users, ds.num_items, train_items[u], max_n);
      for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
        recall_sum[ni][idx] = recall_at_n(ranked, relevant[u], n_list[ni]);
        ndcg_sum[ni][idx] = ndcg_at_n(ranked, relevant[u], n_list[ni]);
      }
    }
  });

  report.evaluated_users = users.size();
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    MetricValues mv;
    if (!users.empty()) {
      double rs = 0.0, nsum = 0.0;
      for (std::size_t idx = 0; idx < users.size(); ++idx) {
        rs += recall_sum[ni][idx];
        nsum += ndcg_sum[ni][idx];
      }
      mv.recall = rs / static_cast<double>(users.size());
      mv.ndcg = nsum / static_cast<double>(users.size());
    }
    report.at[n_list[ni]] = mv;
  }
  if (budget.n > 0) {
    report.storage = storage_bytes(budget.c, budget.d, budget.bits, budget.r,
                                   budget.n, budget.m);
    report.macs_per_layer = static_cast<std::uint64_t>(budget.graph_nnz) *
                            static_cast<std::uint64_t>(budget.d);
  }
  return report;
}

std::string report_to_json(const MetricsReport& report,
                           const std::string& dataset_name,
                           std::uint64_t config_hash, double seconds) {
  nlohmann::json j;
  j["dataset"] = dataset_name;
  j["config_hash"] = config_hash;
  j["storage_bytes"] = {{"codebook", report.storage.codebook_bytes},
                        {"assignment", report.storage.assignment_bytes},
                        {"placeholder", report.storage.placeholder_bytes},
                        {"total", report.storage.total_bytes}};
  j["macs_per_layer"] = report.macs_per_layer;
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& [n, mv] : report.at) {
    metrics[std::to_string(n)] = {{"recall", mv.recall}, {"ndcg", mv.ndcg}};
  }
  j["metrics"] = metrics;
  j["evaluated_users"] = report.evaluated_users;
  j["timing"] = {{"seconds", seconds}};
  return j.dump(2);
}

}  // namespace lerg
