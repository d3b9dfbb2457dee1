#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lerg/csr.hpp"

namespace lerg {

struct PartitionLabels {
  std::size_t c = 0;
  std::vector<std::uint32_t> labels;  // per entity, in [0, c)
};

/// Balanced k-way partition of a symmetric graph: seeded multi-source BFS
/// region growing followed by boundary refinement sweeps that lower the edge
/// cut under the balance cap max_size <= ceil(N/c) * (1 + epsilon).
/// Deterministic under seed. Externally computed labels (e.g. a METIS dump)
/// can be substituted via load_partition_labels.
PartitionLabels partition_entities(const Csr& a, std::size_t c,
                                   std::uint64_t seed, double epsilon = 0.1);

/// Number of edges crossing partitions (each undirected edge counted once).
std::uint64_t edge_cut(const Csr& a, const PartitionLabels& parts);

/// Text file, one label per line, entity order.
PartitionLabels load_partition_labels(const std::string& path, std::size_t n,
                                      std::size_t c);

}  // namespace lerg
