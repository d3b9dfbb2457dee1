#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "lerg/csr.hpp"
#include "lerg/dataset.hpp"
#include "lerg/matrix.hpp"
#include "lerg/rng.hpp"

namespace lerg::test {

inline InteractionDataset random_bipartite(std::size_t users, std::size_t items,
                                           double p, std::uint64_t seed) {
  Rng rng(seed);
  InteractionDataset ds;
  ds.num_users = users;
  ds.num_items = items;
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (std::uint32_t u = 0; u < users; ++u) {
    bool any = false;
    for (std::uint32_t i = 0; i < items; ++i) {
      if (rng.uniform_real(0.0, 1.0) < p) {
        seen.insert({u, i});
        any = true;
      }
    }
    if (!any) seen.insert({u, static_cast<std::uint32_t>(u % items)});
  }
  for (auto [u, i] : seen) ds.pairs.push_back({u, i});
  return ds;
}

inline std::vector<std::vector<double>> csr_to_dense(const Csr& a) {
  std::vector<std::vector<double>> m(a.n_rows,
                                     std::vector<double>(a.n_cols, 0.0));
  for (std::size_t i = 0; i < a.n_rows; ++i)
    for (std::uint64_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
      m[i][a.col_indices[k]] = a.values[k];
  return m;
}

inline Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed,
                            double lo = -1.0, double hi = 1.0) {
  Matrix m(r, c);
  Rng rng(seed);
  for (double& v : m.data) v = rng.uniform_real(lo, hi);
  return m;
}

// Dense reference of the layer-mean propagation.
inline Matrix dense_propagate(const std::vector<std::vector<double>>& a,
                              const Matrix& h0, unsigned layers) {
  const std::size_t n = h0.rows, d = h0.cols;
  Matrix cur = h0, acc = h0;
  for (unsigned l = 1; l <= layers; ++l) {
    Matrix next(n, d);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (a[i][j] != 0.0)
          for (std::size_t k = 0; k < d; ++k)
            next.at(i, k) += a[i][j] * cur.at(j, k);
    cur = next;
    for (std::size_t i = 0; i < acc.data.size(); ++i)
      acc.data[i] += cur.data[i];
  }
  for (double& v : acc.data) v /= static_cast<double>(layers + 1);
  return acc;
}

}  // namespace lerg::test
