#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "helpers.hpp"
#include "lerg/partition.hpp"

using namespace lerg;

namespace {

// K_k on nodes [base, base + k).
void add_clique(std::vector<std::uint32_t>& rows,
                std::vector<std::uint32_t>& cols, std::uint32_t base,
                std::uint32_t k) {
  for (std::uint32_t i = 0; i < k; ++i)
    for (std::uint32_t j = 0; j < k; ++j)
      if (i != j) {
        rows.push_back(base + i);
        cols.push_back(base + j);
      }
}

}  // namespace

TEST_CASE("two disconnected cliques split cleanly") {
  std::vector<std::uint32_t> rows, cols;
  add_clique(rows, cols, 0, 4);
  add_clique(rows, cols, 4, 4);
  const Csr a = Csr::from_triples(8, 8, rows, cols,
                                  std::vector<double>(rows.size(), 1.0));
  const auto parts = partition_entities(a, 2, 7);
  CHECK(edge_cut(a, parts) == 0);
  std::set<std::uint32_t> first;
  for (std::size_t i = 0; i < 4; ++i) first.insert(parts.labels[i]);
  CHECK(first.size() == 1);
}

TEST_CASE("c = N gives singleton partitions") {
  const Csr a = Csr::from_triples(3, 3, {0, 1, 1, 2}, {1, 0, 2, 1},
                                  {1, 1, 1, 1});
  const auto parts = partition_entities(a, 3, 1);
  std::set<std::uint32_t> used(parts.labels.begin(), parts.labels.end());
  CHECK(used.size() == 3);
}

TEST_CASE("path of four splits at the middle edge under zero slack") {
  const Csr a = Csr::from_triples(4, 4, {0, 1, 1, 2, 2, 3}, {1, 0, 2, 1, 3, 2},
                                  {1, 1, 1, 1, 1, 1});
  const auto parts = partition_entities(a, 2, 3, 0.0);
  CHECK(parts.labels[0] == parts.labels[1]);
  CHECK(parts.labels[2] == parts.labels[3]);
  CHECK(parts.labels[0] != parts.labels[2]);
  CHECK(edge_cut(a, parts) == 1);
}

TEST_CASE("determinism and balance cap on random graphs") {
  for (std::uint64_t seed : {2u, 8u}) {
    const auto ds = test::random_bipartite(20, 30, 0.1, seed);
    const Csr a = build_adjacency(ds);
    const std::size_t n = a.n_rows;
    for (std::size_t c : {2u, 5u, 8u}) {
      const auto p1 = partition_entities(a, c, 42, 0.1);
      const auto p2 = partition_entities(a, c, 42, 0.1);
      CHECK(p1.labels == p2.labels);

      std::vector<std::size_t> sizes(c, 0);
      for (std::uint32_t lab : p1.labels) {
        REQUIRE(lab < c);
        ++sizes[lab];
      }
      const auto cap = static_cast<std::size_t>(
          std::floor(std::ceil(static_cast<double>(n) /
                               static_cast<double>(c)) *
                     1.1));
      for (std::size_t s : sizes) CHECK(s <= cap);
    }
  }
}

TEST_CASE("c larger than N is rejected") {
  Csr a(2, 2);
  CHECK_THROWS(partition_entities(a, 3, 1));
}

TEST_CASE("external label files load and validate") {
  std::ofstream("lerg_test_labels.txt") << "0\n1\n0\n";
  const auto parts = load_partition_labels("lerg_test_labels.txt", 3, 2);
  CHECK(parts.labels == std::vector<std::uint32_t>{0, 1, 0});
  CHECK_THROWS(load_partition_labels("lerg_test_labels.txt", 4, 2));
  std::remove("lerg_test_labels.txt");
}
