#include "lerg/placeholder.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "lerg/error.hpp"
#include "lerg/kernels.hpp"
#include "lerg/parallel.hpp"
#include "lerg/rng.hpp"
#include "lerg/serialize.hpp"

namespace lerg {

void PlaceholderCodebook::validate() const {
  if (r == 0) {
    // Degenerate artifact for runs with nothing pruned.
    require(assignment.empty(), "empty codebook cannot assign entities");
    return;
  }
  require(d >= 1, "placeholder dimension must be >= 1");
  require(centroids.rows == r && centroids.cols == d,
          "centroid shape mismatch");
  for (double v : centroids.data)
    require(std::isfinite(v), "centroids must be finite");
  for (std::uint32_t q : assignment)
    require(q < r, "assignment index out of range");
}

namespace {

double sq_dist(const double* a, const double* b, std::size_t d) {
  double acc = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double t = a[k] - b[k];
    acc += t * t;
  }
  return acc;
}

}  // namespace

PlaceholderCodebook cluster_pruned(const Matrix& h_prune, std::size_t r,
                                   std::uint64_t seed,
                                   std::size_t max_iters) {
  const std::size_t n = h_prune.rows, d = h_prune.cols;
  require(r >= 1, "centroid count must be >= 1");
  require(r <= n, "centroid count exceeds point count");
  if (r > n / 10)
    std::cerr << "warning: placeholder centroid count " << r
              << " is large relative to " << n << " pruned entities\n";

  PlaceholderCodebook out;
  out.r = r;
  out.d = d;
  out.centroids = Matrix(r, d);
  out.assignment.assign(n, 0);

  // k-means++ seeding.
  Rng rng(seed);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::size_t first = rng.uniform_index(n);
  std::copy_n(h_prune.row(first), d, out.centroids.row(0));
  for (std::size_t j = 1; j < r; ++j) {
    const double* prev = out.centroids.row(j - 1);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      best[i] = std::min(best[i], sq_dist(h_prune.row(i), prev, d));
      total += best[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform_real(0.0, total);
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += best[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.uniform_index(n);
    }
    std::copy_n(h_prune.row(pick), d, out.centroids.row(j));
  }

  std::vector<double> dist(n, 0.0);
  std::vector<std::size_t> count(r, 0);
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        std::uint32_t arg = 0;
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < r; ++j) {
          const double dd = sq_dist(h_prune.row(i), out.centroids.row(j), d);
          if (dd < lo) {
            lo = dd;
            arg = static_cast<std::uint32_t>(j);
          }
        }
        dist[i] = lo;
        if (out.assignment[i] != arg) {
          out.assignment[i] = arg;
          changed = true;
        }
      }
    });
    if (!changed && iter > 0) break;

    out.centroids.fill(0.0);
    std::fill(count.begin(), count.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      kern::axpy(1.0, h_prune.row(i), out.centroids.row(out.assignment[i]), d);
      ++count[out.assignment[i]];
    }
    for (std::size_t j = 0; j < r; ++j) {
      if (count[j] > 0) {
        kern::scale(1.0 / static_cast<double>(count[j]), out.centroids.row(j),
                    d);
      } else {
        // Re-seed an empty cluster from the point farthest from its centroid.
        std::size_t far = 0;
        for (std::size_t i = 1; i < n; ++i)
          if (dist[i] > dist[far]) far = i;
        std::copy_n(h_prune.row(far), d, out.centroids.row(j));
        dist[far] = 0.0;
      }
    }
  }

  // Final assignment pass so assignments match the returned centroids.
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      std::uint32_t arg = 0;
      double lo = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < r; ++j) {
        const double dd = sq_dist(h_prune.row(i), out.centroids.row(j), d);
        if (dd < lo) {
          lo = dd;
          arg = static_cast<std::uint32_t>(j);
        }
      }
      out.assignment[i] = arg;
    }
  });
  return out;
}

Matrix impute_pruned(const PlaceholderCodebook& p) {
  p.validate();
  Matrix out(p.assignment.size(), p.d);
  for (std::size_t i = 0; i < p.assignment.size(); ++i)
    std::copy_n(p.centroids.row(p.assignment[i]), p.d, out.row(i));
  return out;
}

namespace {
constexpr char kMagic[9] = "LERGPLHD";
}

void save_placeholder(const std::string& path, const PlaceholderCodebook& p) {
  io::Writer w(path);
  w.magic(kMagic);
  w.pod<std::uint32_t>(1);
  w.pod<std::uint64_t>(p.r);
  w.pod<std::uint64_t>(p.d);
  std::vector<float> cents(p.centroids.data.begin(), p.centroids.data.end());
  w.array(cents.data(), cents.size());
  w.pod<std::uint64_t>(p.assignment.size());
  w.array(p.assignment.data(), p.assignment.size());
  w.close();
}

PlaceholderCodebook load_placeholder(const std::string& path) {
  io::Reader r(path);
  r.expect_magic(kMagic, "placeholder codebook");
  const auto version = r.pod<std::uint32_t>();
  require(version == 1, "unsupported placeholder version");
  PlaceholderCodebook p;
  p.r = static_cast<std::size_t>(r.pod<std::uint64_t>());
  p.d = static_cast<std::size_t>(r.pod<std::uint64_t>());
  const std::vector<float> cents = r.array<float>(p.r * p.d);
  p.centroids = Matrix(p.r, p.d);
  std::copy(cents.begin(), cents.end(), p.centroids.data.begin());
  const auto count = static_cast<std::size_t>(r.pod<std::uint64_t>());
  p.assignment = r.array<std::uint32_t>(count);
  p.validate();
  return p;
}

}  // namespace lerg
