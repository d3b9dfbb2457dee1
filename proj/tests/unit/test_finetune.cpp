#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "lerg/finetune.hpp"
#include "lerg/partition.hpp"
#include "lerg/propagation.hpp"
#include "lerg/synthetic.hpp"

using namespace lerg;

namespace {

struct Setup {
  InteractionDataset ds;
  DatasetSplit split;
  Csr adj;
  AssignmentMatrix s;
  Matrix backbone;
  std::vector<double> step;
  TrainConfig cfg;
};

Setup make_setup(std::uint64_t seed) {
  Setup t;
  SyntheticSpec spec;
  spec.num_users = 10;
  spec.num_items = 14;
  spec.communities = 2;
  spec.interactions_per_user = 5;
  spec.seed = seed;
  t.ds = make_synthetic(spec);
  t.split = split_dataset(t.ds, {0.8, 0.1, 0.1}, seed);
  sample_negatives(t.split, t.ds, 2, seed + 1);
  t.adj = build_adjacency(t.ds);
  t.s = init_assignment(partition_entities(t.adj, 4, seed + 2), 4, 0.9,
                        seed + 3);
  t.backbone = init_codebook(4, 6, seed + 4);
  t.step = init_step(t.backbone, 16);
  t.cfg.batch_size = 32;
  t.cfg.max_epochs = 4;
  t.cfg.patience = 10;
  t.cfg.layers = 2;
  t.cfg.bits = 16;
  t.cfg.seed = seed + 5;
  return t;
}

RetentionPlan keep_top(const Matrix& h, std::size_t m) {
  return select_retained(contribution_scores(h), m);
}

PlaceholderCodebook empty_placeholder(std::size_t d) {
  PlaceholderCodebook pc;
  pc.d = d;
  return pc;
}

}  // namespace

TEST_CASE("zero epochs return the input parameters bit-exactly") {
  auto t = make_setup(3);
  t.cfg.max_epochs = 0;
  const auto plan = keep_top(test::random_matrix(t.s.n, 6, 1), t.s.n);
  const auto g = rewire(t.adj, plan, 4);
  const auto art = finetune(t.backbone, t.step, t.s, plan, g,
                            empty_placeholder(6), t.ds, t.split, t.cfg);
  CHECK(art.backbone.data == t.backbone.data);
  CHECK(art.step == t.step);
}

TEST_CASE("full retention fine-tuning equals continued pretraining") {
  auto t = make_setup(5);
  const auto plan = keep_top(test::random_matrix(t.s.n, 6, 2), t.s.n);
  const auto g = rewire(t.adj, plan, 4);
  REQUIRE(g.adjacency.nnz() == t.adj.nnz());

  const auto ft = finetune(t.backbone, t.step, t.s, plan, g,
                           empty_placeholder(6), t.ds, t.split, t.cfg);
  const auto pre = pretrain(t.ds, t.split, normalize_symmetric(t.adj), t.s,
                            t.backbone, t.step, t.cfg);
  CHECK(ft.backbone.data == pre.backbone.data);
  CHECK(ft.step == pre.step);
}

TEST_CASE("retained-submatrix propagation equals zero-padded full propagation") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto ds = test::random_bipartite(8, 10, 0.2, 200 + seed);
    const Csr a = build_adjacency(ds);
    const std::size_t n = a.n_rows;
    const auto h = test::random_matrix(n, 3, seed);
    const auto plan = select_retained(contribution_scores(h), n - 5);
    const auto g = rewire(a, plan, 4);
    const Csr full = normalize_symmetric(g.adjacency);

    // Retained x retained slice of the same normalized matrix.
    std::vector<std::int64_t> row_of(n, -1);
    for (std::size_t i = 0; i < plan.retained.size(); ++i)
      row_of[plan.retained[i]] = static_cast<std::int64_t>(i);
    Csr sub(plan.m, plan.m);
    for (std::size_t i = 0; i < plan.retained.size(); ++i) {
      const std::uint32_t e = plan.retained[i];
      for (std::uint64_t k = full.row_offsets[e]; k < full.row_offsets[e + 1];
           ++k) {
        const std::int64_t col = row_of[full.col_indices[k]];
        if (col < 0) continue;
        sub.col_indices.push_back(static_cast<std::uint32_t>(col));
        sub.values.push_back(full.values[k]);
      }
      sub.row_offsets[i + 1] = sub.col_indices.size();
    }

    // Full propagation with arbitrary junk in the pruned input rows.
    Matrix h_full = test::random_matrix(n, 3, seed + 50);
    Matrix h_sub(plan.m, 3);
    for (std::size_t i = 0; i < plan.retained.size(); ++i)
      for (std::size_t k = 0; k < 3; ++k)
        h_sub.at(i, k) = h_full.at(plan.retained[i], k);

    const Matrix out_full = propagate(full, h_full, 3);
    const Matrix out_sub = propagate(sub, h_sub, 3);
    for (std::size_t i = 0; i < plan.retained.size(); ++i)
      for (std::size_t k = 0; k < 3; ++k)
        CHECK(std::abs(out_sub.at(i, k) - out_full.at(plan.retained[i], k)) <
              1e-10);
  }
}

TEST_CASE("placeholder rows do not leak gradient into the codebook") {
  // Dataset with one item that never appears in train pairs or negatives;
  // prune exactly that item. Fine-tuning with two different placeholder
  // codebooks must produce identical parameters.
  InteractionDataset ds;
  ds.num_users = 3;
  ds.num_items = 4;
  ds.pairs = {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 0}, {2, 2}};
  DatasetSplit split;
  split.train = ds.pairs;
  split.negatives = {{2}, {2}, {0}, {0}, {1}, {1}};  // item 3 never sampled

  const Csr adj = build_adjacency(ds);
  const auto s = init_assignment(partition_entities(adj, 3, 1), 3, 0.9, 2);
  Matrix backbone = init_codebook(3, 4, 3);
  auto step = init_step(backbone, 16);

  const std::uint32_t pruned_entity = ds.item_entity(3);
  std::vector<double> scores(ds.num_entities(), 1.0);
  scores[pruned_entity] = -1.0;
  const auto plan = select_retained(scores, ds.num_entities() - 1);
  const auto g = rewire(adj, plan, 4);

  TrainConfig cfg;
  cfg.batch_size = 16;
  cfg.max_epochs = 3;
  cfg.layers = 2;
  cfg.bits = 16;

  PlaceholderCodebook pa;
  pa.r = 1;
  pa.d = 4;
  pa.centroids = Matrix(1, 4);
  pa.assignment = {0};
  PlaceholderCodebook pb = pa;
  pb.centroids.fill(3.5);

  const auto fa = finetune(backbone, step, s, plan, g, pa, ds, split, cfg);
  const auto fb = finetune(backbone, step, s, plan, g, pb, ds, split, cfg);
  CHECK(fa.backbone.data == fb.backbone.data);
  CHECK(fa.step == fb.step);
}

TEST_CASE("inconsistent artifacts are rejected with a mismatch list") {
  auto t = make_setup(9);
  const auto plan = keep_top(test::random_matrix(t.s.n, 6, 4), t.s.n);
  const auto g = rewire(t.adj, plan, 4);
  PlaceholderCodebook bad;
  bad.r = 2;
  bad.d = 5;  // wrong dimension
  bad.centroids = Matrix(2, 5);
  bad.assignment = {0};  // wrong count for an empty pruned set
  bool threw = false;
  try {
    finetune(t.backbone, t.step, t.s, plan, g, bad, t.ds, t.split, t.cfg);
  } catch (const std::exception& e) {
    threw = true;
    const std::string msg = e.what();
    CHECK(msg.find("placeholder") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("inference table: empty pruned set equals plain propagation") {
  auto t = make_setup(13);
  const auto plan = keep_top(test::random_matrix(t.s.n, 6, 5), t.s.n);
  const auto g = rewire(t.adj, plan, 4);
  const Matrix table = assemble_inference_table(
      t.backbone, t.s, plan, g, empty_placeholder(6), t.cfg.layers);
  const Matrix expect = propagate(normalize_symmetric(g.adjacency),
                                  infer_full_table(t.s, t.backbone),
                                  t.cfg.layers);
  for (std::size_t i = 0; i < table.data.size(); ++i)
    CHECK(table.data[i] == doctest::Approx(expect.data[i]).epsilon(1e-12));
}

TEST_CASE("inference table: pruned rows come from the placeholders") {
  auto t = make_setup(17);
  const auto h = test::random_matrix(t.s.n, 6, 6);
  auto plan = select_retained(contribution_scores(h), t.s.n - 3);
  const auto g = rewire(t.adj, plan, 4);

  PlaceholderCodebook pc;
  pc.r = 2;
  pc.d = 6;
  pc.centroids = test::random_matrix(2, 6, 7);
  pc.assignment = {0, 1, 0};
  const Matrix table =
      assemble_inference_table(t.backbone, t.s, plan, g, pc, t.cfg.layers);
  for (std::size_t i = 0; i < plan.pruned.size(); ++i)
    for (std::size_t k = 0; k < 6; ++k)
      CHECK(table.at(plan.pruned[i], k) ==
            pc.centroids.at(pc.assignment[i], k));
}
