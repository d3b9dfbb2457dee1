#include "lerg/assignment.hpp"

#include <stdexcept>

#include "lerg/kernels.hpp"
#include "lerg/parallel.hpp"
#include "lerg/rng.hpp"
#include "lerg/serialize.hpp"

namespace lerg {

namespace {
constexpr char kMagic[8] = {'L', 'E', 'R', 'G', 'A', 'S', 'G', 'N'};
}

void AssignmentMatrix::validate() const {
  require(anchor_index.size() == n && aux_index.size() == n,
          "assignment index arrays must cover all entities");
  require(w_star > 0.0 && w_star < 1.0, "w_star must lie in (0, 1)");
  for (std::size_t p = 0; p < n; ++p) {
    require(anchor_index[p] < c && aux_index[p] < c,
            "assignment index out of range");
    require(c == 1 || anchor_index[p] != aux_index[p],
            "anchor and auxiliary indices must differ");
  }
}

AssignmentMatrix init_assignment(const PartitionLabels& parts, std::size_t c,
                                 double w_star, std::uint64_t seed) {
  require(w_star > 0.0 && w_star < 1.0, "w_star must lie in (0, 1)");
  require(parts.c == c, "partition count must equal codebook size");
  AssignmentMatrix s;
  s.n = parts.labels.size();
  s.c = c;
  s.w_star = w_star;
  s.anchor_index = parts.labels;
  s.aux_index.resize(s.n);
  Rng rng(seed);
  for (std::size_t p = 0; p < s.n; ++p) {
    require(parts.labels[p] < c, "partition label out of range");
    if (c == 1) {
      s.aux_index[p] = 0;
      continue;
    }
    // Uniform over [0, c) \ {anchor}.
    auto draw = static_cast<std::uint32_t>(rng.uniform_index(c - 1));
    if (draw >= s.anchor_index[p]) ++draw;
    s.aux_index[p] = draw;
  }
  return s;
}

Matrix infer_full_table(const AssignmentMatrix& s, const Matrix& codebook) {
  std::vector<std::uint32_t> all(s.n);
  for (std::size_t p = 0; p < s.n; ++p)
    all[p] = static_cast<std::uint32_t>(p);
  return infer_rows(s, codebook, all);
}

Matrix infer_rows(const AssignmentMatrix& s, const Matrix& codebook,
                  const std::vector<std::uint32_t>& entities) {
  require(codebook.rows == s.c, "codebook row count must equal assignment c");
  const std::size_t d = codebook.cols;
  Matrix out(entities.size(), d);
  const double w = s.w_star;
  const double w2 = 1.0 - s.w_star;
  parallel_for(entities.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const std::uint32_t p = entities[i];
      kern::scale_add(w, codebook.row(s.anchor_index[p]), w2,
                      codebook.row(s.aux_index[p]), out.row(i), d);
    }
  });
  return out;
}

Matrix infer_rows_adjoint(const AssignmentMatrix& s, const Matrix& grad_rows,
                          const std::vector<std::uint32_t>& entities,
                          std::size_t d) {
  require(grad_rows.rows == entities.size(), "gradient row count mismatch");
  require(grad_rows.cols == d, "gradient dimension mismatch");
  Matrix grad(s.c, d);
  const double w = s.w_star;
  const double w2 = 1.0 - s.w_star;
  for (std::size_t i = 0; i < entities.size(); ++i) {
    const std::uint32_t p = entities[i];
    kern::axpy(w, grad_rows.row(i), grad.row(s.anchor_index[p]), d);
    kern::axpy(w2, grad_rows.row(i), grad.row(s.aux_index[p]), d);
  }
  return grad;
}

void save_assignment(const std::string& path, const AssignmentMatrix& s) {
  io::Writer w(path);
  w.magic(kMagic);
  w.pod<std::uint32_t>(1);
  w.pod<std::uint64_t>(s.n);
  w.pod<std::uint64_t>(s.c);
  w.pod<double>(s.w_star);
  w.array(s.anchor_index.data(), s.n);
  w.array(s.aux_index.data(), s.n);
  w.close();
}

AssignmentMatrix load_assignment(const std::string& path) {
  io::Reader r(path);
  r.expect_magic(kMagic, "assignment");
  const auto version = r.pod<std::uint32_t>();
  if (version != 1) throw std::runtime_error("unsupported assignment version");
  AssignmentMatrix s;
  s.n = r.pod<std::uint64_t>();
  s.c = r.pod<std::uint64_t>();
  s.w_star = r.pod<double>();
  s.anchor_index = r.array<std::uint32_t>(s.n);
  s.aux_index = r.array<std::uint32_t>(s.n);
  s.validate();
  return s;
}

}  // namespace lerg
