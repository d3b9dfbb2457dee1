#include "lerg/csr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lerg {

void Csr::validate() const {
  require(row_offsets.size() == n_rows + 1, "row_offsets length mismatch");
  require(row_offsets.front() == 0, "row_offsets must start at 0");
  require(row_offsets.back() == col_indices.size(),
          "row_offsets must end at nnz");
  require(values.size() == col_indices.size(), "values/col_indices mismatch");
  for (std::size_t i = 0; i < n_rows; ++i) {
    require(row_offsets[i] <= row_offsets[i + 1],
            "row_offsets must be nondecreasing");
    for (std::uint64_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      require(col_indices[k] < n_cols, "column index out of range");
      if (k > row_offsets[i])
        require(col_indices[k - 1] < col_indices[k],
                "column indices must be strictly increasing within a row");
      require(std::isfinite(values[k]), "values must be finite");
    }
  }
}

Csr Csr::transpose() const {
  Csr t(n_cols, n_rows);
  std::vector<std::uint64_t> counts(n_cols, 0);
  for (std::uint32_t c : col_indices) counts[c]++;
  t.row_offsets.resize(n_cols + 1);
  t.row_offsets[0] = 0;
  for (std::size_t i = 0; i < n_cols; ++i)
    t.row_offsets[i + 1] = t.row_offsets[i] + counts[i];
  t.col_indices.resize(nnz());
  t.values.resize(nnz());
  std::vector<std::uint64_t> cursor(t.row_offsets.begin(),
                                    t.row_offsets.end() - 1);
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (std::uint64_t k = row_offsets[r]; k < row_offsets[r + 1]; ++k) {
      const std::uint32_t c = col_indices[k];
      const std::uint64_t pos = cursor[c]++;
      t.col_indices[pos] = static_cast<std::uint32_t>(r);
      t.values[pos] = values[k];
    }
  }
  return t;
}

Csr Csr::from_triples(std::size_t n_rows, std::size_t n_cols,
                      std::vector<std::uint32_t> rows,
                      std::vector<std::uint32_t> cols,
                      std::vector<double> vals) {
  require(rows.size() == cols.size() && cols.size() == vals.size(),
          "triple arrays must have equal length");
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (rows[a] != rows[b]) return rows[a] < rows[b];
    return cols[a] < cols[b];
  });
  Csr m(n_rows, n_cols);
  m.col_indices.reserve(rows.size());
  m.values.reserve(rows.size());
  for (std::size_t idx = 0; idx < order.size(); ++idx) {
    const std::size_t k = order[idx];
    if (idx > 0) {
      const std::size_t prev = order[idx - 1];
      require(!(rows[prev] == rows[k] && cols[prev] == cols[k]),
              "duplicate (row, col) entry");
    }
    require(rows[k] < n_rows && cols[k] < n_cols, "triple index out of range");
    m.col_indices.push_back(cols[k]);
    m.values.push_back(vals[k]);
  }
  std::vector<std::uint64_t> offs(n_rows + 1, 0);
  for (std::uint32_t r : rows) offs[r + 1]++;
  for (std::size_t r = 0; r < n_rows; ++r) offs[r + 1] += offs[r];
  m.row_offsets = std::move(offs);
  return m;
}

Csr build_adjacency(const InteractionDataset& ds) {
  const std::size_t n = ds.num_entities();
  std::vector<std::uint32_t> rows, cols;
  rows.reserve(ds.pairs.size() * 2);
  cols.reserve(ds.pairs.size() * 2);
  for (const Pair& p : ds.pairs) {
    const std::uint32_t u = p.user;
    const std::uint32_t ie = ds.item_entity(p.item);
    rows.push_back(u);
    cols.push_back(ie);
    rows.push_back(ie);
    cols.push_back(u);
  }
  std::vector<double> vals(rows.size(), 1.0);
  return Csr::from_triples(n, n, std::move(rows), std::move(cols),
                           std::move(vals));
}

Csr normalize_symmetric(const Csr& a) {
  require(a.n_rows == a.n_cols, "normalize_symmetric requires a square matrix");
  std::vector<double> row_sum(a.n_rows, 0.0);
  std::vector<double> col_sum(a.n_cols, 0.0);
  for (std::size_t r = 0; r < a.n_rows; ++r) {
    for (std::uint64_t k = a.row_offsets[r]; k < a.row_offsets[r + 1]; ++k) {
      require(a.values[k] >= 0.0, "normalize_symmetric requires nonnegative values");
      row_sum[r] += a.values[k];
      col_sum[a.col_indices[k]] += a.values[k];
    }
  }
  Csr out = a;
  for (std::size_t r = 0; r < a.n_rows; ++r) {
    for (std::uint64_t k = a.row_offsets[r]; k < a.row_offsets[r + 1]; ++k) {
      const double denom = row_sum[r] * col_sum[a.col_indices[k]];
      out.values[k] = denom > 0.0 ? a.values[k] / std::sqrt(denom) : 0.0;
    }
  }
  return out;
}

std::vector<std::uint32_t> multi_hop_row(const Csr& a, std::uint32_t j,
                                         std::uint32_t t) {
  require(a.n_rows == a.n_cols, "multi_hop_row requires a square matrix");
  require(j < a.n_rows, "entity out of range");
  require(t >= 1, "hop count must be >= 1");
  // Bounded BFS; never materializes a matrix power.
  std::vector<std::uint8_t> seen(a.n_rows, 0);
  std::vector<std::uint32_t> frontier{j}, next, reached;
  seen[j] = 1;
  for (std::uint32_t depth = 0; depth < t && !frontier.empty(); ++depth) {
    next.clear();
    for (std::uint32_t v : frontier) {
      for (std::uint64_t k = a.row_offsets[v]; k < a.row_offsets[v + 1]; ++k) {
        const std::uint32_t w = a.col_indices[k];
        if (!seen[w]) {
          seen[w] = 1;
          next.push_back(w);
          reached.push_back(w);
        }
      }
    }
    frontier.swap(next);
  }
  std::sort(reached.begin(), reached.end());
  return reached;
}

}  // namespace lerg
