#include "lerg/rewiring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lerg/error.hpp"
#include "lerg/kernels.hpp"
#include "lerg/parallel.hpp"
#include "lerg/serialize.hpp"

namespace lerg {

void RetentionPlan::validate() const {
  const std::size_t n = retained_mask.size();
  require(retained.size() == m, "retained count must equal m");
  require(retained.size() + pruned.size() == n,
          "retained and pruned must partition the entities");
  require(scores.size() == n, "scores must cover all entities");
  for (std::uint32_t e : retained)
    require(e < n && retained_mask[e] == 1, "retained/mask disagreement");
  for (std::uint32_t e : pruned)
    require(e < n && retained_mask[e] == 0, "pruned/mask disagreement");
}

std::vector<double> contribution_scores(const Matrix& h) {
  const std::size_t n = h.rows, d = h.cols;
  std::vector<double> g(d, 0.0);
  for (std::size_t j = 0; j < n; ++j) kern::axpy(1.0, h.row(j), g.data(), d);

  std::vector<double> scores(n, 0.0);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j)
      scores[j] = kern::dot(h.row(j), g.data(), d);
  });
  return scores;
}

RetentionPlan select_retained(const std::vector<double>& scores, std::size_t m,
                              double o) {
  const std::size_t n = scores.size();
  require(m >= 1 && m <= n, "m must lie in [1, N]");
  require(o >= 0.0 && o <= 1.0, "rounding boundary must lie in [0, 1]");

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::partial_sort(order.begin(), order.begin() + static_cast<long>(m),
                    order.end(), [&](std::uint32_t a, std::uint32_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;
                    });

  RetentionPlan plan;
  plan.m = m;
  plan.scores = scores;
  plan.retained_mask.assign(n, 0);
  for (std::size_t i = 0; i < m; ++i) plan.retained_mask[order[i]] = 1;
  plan.retained.reserve(m);
  plan.pruned.reserve(n - m);
  for (std::uint32_t e = 0; e < n; ++e)
    (plan.retained_mask[e] ? plan.retained : plan.pruned).push_back(e);
  return plan;
}

Csr prune_columns(const Csr& a, const std::vector<std::uint32_t>& pruned) {
  std::vector<std::uint8_t> drop(a.n_cols, 0);
  for (std::uint32_t j : pruned) {
    require(j < a.n_cols, "pruned entity out of range");
    drop[j] = 1;
  }

  Csr out(a.n_rows, a.n_cols);
  out.col_indices.reserve(a.nnz());
  out.values.reserve(a.nnz());
  for (std::size_t i = 0; i < a.n_rows; ++i) {
    for (std::uint64_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
      if (drop[a.col_indices[k]]) continue;
      out.col_indices.push_back(a.col_indices[k]);
      out.values.push_back(a.values[k]);
    }
    out.row_offsets[i + 1] = out.col_indices.size();
  }
  return out;
}

RewiredGraph rewire(const Csr& a, const RetentionPlan& plan,
                    std::uint32_t t_max) {
  require(a.n_rows == a.n_cols, "adjacency must be square");
  require(plan.retained_mask.size() == a.n_rows,
          "plan must cover all entities");
  require(t_max >= 2, "max hop count must be >= 2");
  plan.validate();

  const std::size_t n = a.n_rows;
  const Csr pruned_adj = prune_columns(a, plan.pruned);

  // Backfill rows that lost every outgoing-signal source: take the nearest
  // multi-hop neighborhood that still contains retained entities and weight
  // its members uniformly (signum).
  std::vector<std::vector<std::uint32_t>> fill(n);
  std::vector<std::uint32_t> fill_hops(n, 0);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      if (pruned_adj.row_nnz(j) != 0) continue;
      for (std::uint32_t t = 2; t <= t_max; ++t) {
        std::vector<std::uint32_t> hop =
            multi_hop_row(a, static_cast<std::uint32_t>(j), t);
        hop.erase(std::remove_if(hop.begin(), hop.end(),
                                 [&](std::uint32_t e) {
                                   return plan.retained_mask[e] == 0;
                                 }),
                  hop.end());
        if (!hop.empty()) {
          fill[j] = std::move(hop);
          fill_hops[j] = t;
          break;
        }
      }
    }
  });

  RewiredGraph out;
  out.retained_mask = plan.retained_mask;
  out.fill_hops = std::move(fill_hops);
  out.adjacency = Csr(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    if (out.fill_hops[j] > 0) {
      for (std::uint32_t e : fill[j]) {
        out.adjacency.col_indices.push_back(e);
        out.adjacency.values.push_back(1.0);
      }
    } else if (pruned_adj.row_nnz(j) != 0) {
      for (std::uint64_t k = pruned_adj.row_offsets[j];
           k < pruned_adj.row_offsets[j + 1]; ++k) {
        out.adjacency.col_indices.push_back(pruned_adj.col_indices[k]);
        out.adjacency.values.push_back(pruned_adj.values[k]);
      }
    } else {
      out.unrecovered.push_back(static_cast<std::uint32_t>(j));
    }
    out.adjacency.row_offsets[j + 1] = out.adjacency.col_indices.size();
  }
  return out;
}

namespace {
constexpr char kMagic[9] = "LERGRWGR";
}

void save_rewired(const std::string& path, const RewiredGraph& g) {
  g.adjacency.validate();
  const std::size_t n = g.adjacency.n_rows;
  require(g.retained_mask.size() == n, "mask must cover all rows");

  io::Writer w(path);
  w.magic(kMagic);
  w.pod<std::uint32_t>(1);
  w.pod<std::uint64_t>(n);
  w.pod<std::uint64_t>(g.adjacency.nnz());
  w.array(g.adjacency.row_offsets.data(), n + 1);
  w.array(g.adjacency.col_indices.data(), g.adjacency.nnz());
  std::vector<float> vals(g.adjacency.values.begin(), g.adjacency.values.end());
  w.array(vals.data(), vals.size());
  std::vector<std::uint8_t> bitmap((n + 7) / 8, 0);
  for (std::size_t e = 0; e < n; ++e)
    if (g.retained_mask[e]) bitmap[e / 8] |= static_cast<std::uint8_t>(1u << (e % 8));
  w.bytes(bitmap);
  w.close();
}

RewiredGraph load_rewired(const std::string& path) {
  io::Reader r(path);
  r.expect_magic(kMagic, "rewired graph");
  const auto version = r.pod<std::uint32_t>();
  require(version == 1, "unsupported rewired graph version");
  const auto n = static_cast<std::size_t>(r.pod<std::uint64_t>());
  const auto nnz = static_cast<std::size_t>(r.pod<std::uint64_t>());

  RewiredGraph g;
  g.adjacency.n_rows = g.adjacency.n_cols = n;
  g.adjacency.row_offsets = r.array<std::uint64_t>(n + 1);
  g.adjacency.col_indices = r.array<std::uint32_t>(nnz);
  const std::vector<float> vals = r.array<float>(nnz);
  g.adjacency.values.assign(vals.begin(), vals.end());
  const std::vector<std::uint8_t> bitmap = r.array<std::uint8_t>((n + 7) / 8);
  g.retained_mask.assign(n, 0);
  for (std::size_t e = 0; e < n; ++e)
    g.retained_mask[e] = (bitmap[e / 8] >> (e % 8)) & 1u;
  g.adjacency.validate();
  g.fill_hops.assign(n, 0);
  return g;
}

}  // namespace lerg
