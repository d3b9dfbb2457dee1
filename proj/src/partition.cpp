#include "lerg/partition.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "lerg/rng.hpp"

namespace lerg {

namespace {

constexpr std::uint32_t kUnassigned = std::numeric_limits<std::uint32_t>::max();

// Farthest-point seed spreading: start from one random node, then repeatedly
// take the node with the largest BFS distance to the current seed set
// (unreachable nodes count as infinitely far). Guarantees one seed per
// connected component while seeds remain.
std::vector<std::uint32_t> spread_seeds(const Csr& a, std::size_t c, Rng& rng) {
  const std::size_t n = a.n_rows;
  constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> dist(n, kInf);
  std::vector<std::uint32_t> seeds;
  seeds.reserve(c);

  auto bfs_from = [&](std::uint32_t s) {
    std::deque<std::uint32_t> q;
    dist[s] = 0;
    q.push_back(s);
    while (!q.empty()) {
      const std::uint32_t v = q.front();
      q.pop_front();
      for (std::uint64_t k = a.row_offsets[v]; k < a.row_offsets[v + 1]; ++k) {
        const std::uint32_t w = a.col_indices[k];
        if (dist[v] + 1 < dist[w]) {
          dist[w] = dist[v] + 1;
          q.push_back(w);
        }
      }
    }
  };

  const auto first = static_cast<std::uint32_t>(rng.uniform_index(n));
  seeds.push_back(first);
  bfs_from(first);
  while (seeds.size() < c) {
    std::uint32_t best = kUnassigned;
    std::uint32_t best_dist = 0;
    for (std::uint32_t v = 0; v < n; ++v) {
      if (dist[v] == 0) continue;  // already a seed or distance-0 duplicate
      if (best == kUnassigned || dist[v] > best_dist) {
        best = v;
        best_dist = dist[v];
      }
    }
    if (best == kUnassigned) {
      // Fewer reachable-yet-unseeded nodes than partitions; fall back to the
      // lowest-index node not yet used as a seed.
      std::vector<std::uint8_t> used(n, 0);
      for (std::uint32_t s : seeds) used[s] = 1;
      for (std::uint32_t v = 0; v < n && best == kUnassigned; ++v)
        if (!used[v]) best = v;
      if (best == kUnassigned)
        throw std::invalid_argument("partition count exceeds entity count");
    }
    seeds.push_back(best);
    bfs_from(best);
  }
  return seeds;
}

}  // namespace

PartitionLabels partition_entities(const Csr& a, std::size_t c,
                                   std::uint64_t seed, double epsilon) {
  require(a.n_rows == a.n_cols, "partitioner requires a square matrix");
  const std::size_t n = a.n_rows;
  require(c >= 2, "partition count must be >= 2");
  if (c > n) throw std::invalid_argument("partition count exceeds entity count");
  require(epsilon >= 0.0, "balance tolerance must be nonnegative");

  const std::size_t ceil_share = (n + c - 1) / c;
  const std::size_t cap = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::floor(static_cast<double>(ceil_share) * (1.0 + epsilon))));

  Rng rng(seed);
  std::vector<std::uint32_t> labels(n, kUnassigned);
  std::vector<std::size_t> size(c, 0);

  const std::vector<std::uint32_t> seeds = spread_seeds(a, c, rng);
  std::vector<std::deque<std::uint32_t>> frontier(c);
  for (std::size_t p = 0; p < c; ++p) {
    labels[seeds[p]] = static_cast<std::uint32_t>(p);
    size[p] = 1;
    frontier[p].push_back(seeds[p]);
  }

  // Round-robin region growing: one claim per partition per round keeps the
  // regions balanced while the cap is respected.
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t p = 0; p < c; ++p) {
      if (size[p] >= cap) continue;
      bool claimed = false;
      while (!frontier[p].empty() && !claimed) {
        const std::uint32_t v = frontier[p].front();
        for (std::uint64_t k = a.row_offsets[v];
             k < a.row_offsets[v + 1] && !claimed; ++k) {
          const std::uint32_t w = a.col_indices[k];
          if (labels[w] == kUnassigned) {
            labels[w] = static_cast<std::uint32_t>(p);
            ++size[p];
            frontier[p].push_back(w);
            claimed = true;
            progress = true;
          }
        }
        if (!claimed) frontier[p].pop_front();
      }
    }
  }

  // Leftovers: disconnected nodes or nodes walled off by full partitions.
  for (std::uint32_t v = 0; v < n; ++v) {
    if (labels[v] != kUnassigned) continue;
    std::size_t best = c;
    for (std::size_t p = 0; p < c; ++p)
      if (size[p] < cap && (best == c || size[p] < size[best])) best = p;
    if (best == c) best = 0;  // all at cap; place deterministically
    labels[v] = static_cast<std::uint32_t>(best);
    ++size[best];
  }

  // Boundary refinement: move a node to its neighbor-majority partition when
  // that strictly lowers the edge cut and keeps the cap.
  std::vector<std::uint32_t> nbr_count(c, 0);
  for (int sweep = 0; sweep < 10; ++sweep) {
    bool moved = false;
    for (std::uint32_t v = 0; v < n; ++v) {
      std::fill(nbr_count.begin(), nbr_count.end(), 0);
      for (std::uint64_t k = a.row_offsets[v]; k < a.row_offsets[v + 1]; ++k)
        ++nbr_count[labels[a.col_indices[k]]];
      const std::uint32_t cur = labels[v];
      std::uint32_t best = cur;
      for (std::uint32_t p = 0; p < c; ++p) {
        if (p == cur || size[p] >= cap) continue;
        if (nbr_count[p] > nbr_count[best]) best = p;
      }
      if (best != cur && nbr_count[best] > nbr_count[cur] && size[cur] > 1) {
        labels[v] = best;
        --size[cur];
        ++size[best];
        moved = true;
      }
    }
    if (!moved) break;
  }

  PartitionLabels out;
  out.c = c;
  out.labels = std::move(labels);
  return out;
}

std::uint64_t edge_cut(const Csr& a, const PartitionLabels& parts) {
  std::uint64_t cut = 0;
  for (std::size_t r = 0; r < a.n_rows; ++r) {
    for (std::uint64_t k = a.row_offsets[r]; k < a.row_offsets[r + 1]; ++k) {
      const std::uint32_t cidx = a.col_indices[k];
      if (cidx > r && parts.labels[r] != parts.labels[cidx]) ++cut;
    }
  }
  return cut;
}

PartitionLabels load_partition_labels(const std::string& path, std::size_t n,
                                      std::size_t c) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open partition labels: " + path);
  PartitionLabels parts;
  parts.c = c;
  parts.labels.reserve(n);
  std::uint64_t v;
  while (in >> v) {
    if (v >= c) throw std::runtime_error("partition label out of range");
    parts.labels.push_back(static_cast<std::uint32_t>(v));
  }
  if (parts.labels.size() != n)
    throw std::runtime_error("partition label count does not match entities");
  return parts;
}

}  // namespace lerg
