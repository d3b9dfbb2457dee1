#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include "helpers.hpp"
#include "lerg/dataset.hpp"

using namespace lerg;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& content) {
    static int counter = 0;
    path = "lerg_test_" + std::to_string(counter++) + ".txt";
    std::ofstream(path) << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("load_interactions basic mapping and dedup") {
  TempFile f("u1\ti1\nu2\ti2\n");
  const auto ds = load_interactions(f.path, PairFormat::tsv_pairs);
  CHECK(ds.num_users == 2);
  CHECK(ds.num_items == 2);
  CHECK(ds.pairs.size() == 2);
  CHECK(ds.pairs[0] == Pair{0, 0});
  CHECK(ds.pairs[1] == Pair{1, 1});

  TempFile g("u1\ti1\nu1\ti1\n");
  CHECK(load_interactions(g.path, PairFormat::tsv_pairs).pairs.size() == 1);
}

TEST_CASE("load_interactions csv, comments, and errors") {
  TempFile f("# header\na,x\nb,y\na,y\n");
  const auto ds = load_interactions(f.path, PairFormat::csv_pairs);
  CHECK(ds.num_users == 2);
  CHECK(ds.num_items == 2);
  CHECK(ds.pairs.size() == 3);

  TempFile bad("u1\ti1\nonly_one_token\n");
  bool threw = false;
  try {
    load_interactions(bad.path, PairFormat::tsv_pairs);
  } catch (const std::exception& e) {
    threw = true;
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK(threw);

  TempFile empty("");
  CHECK_THROWS(load_interactions(empty.path, PairFormat::tsv_pairs));
  CHECK_THROWS(load_interactions("no_such_file.tsv", PairFormat::tsv_pairs));
}

TEST_CASE("split counts and degenerate ratios") {
  InteractionDataset ds;
  ds.num_users = 1;
  ds.num_items = 10;
  for (std::uint32_t i = 0; i < 10; ++i) ds.pairs.push_back({0, i});

  const auto split = split_dataset(ds, {0.8, 0.1, 0.1}, 3);
  CHECK(split.train.size() == 8);
  CHECK(split.valid.size() == 1);
  CHECK(split.test.size() == 1);

  const auto all_train = split_dataset(ds, {1.0, 0.0, 0.0}, 3);
  CHECK(all_train.train.size() == 10);
  CHECK(all_train.valid.empty());
  CHECK(all_train.test.empty());

  CHECK_THROWS(split_dataset(ds, {0.0, 0.0, 0.0}, 3));
}

TEST_CASE("split is a deterministic partition; tiny users stay in train") {
  const auto ds = test::random_bipartite(12, 20, 0.15, 17);
  const auto s1 = split_dataset(ds, {0.8, 0.1, 0.1}, 5);
  const auto s2 = split_dataset(ds, {0.8, 0.1, 0.1}, 5);
  CHECK(s1.train == s2.train);
  CHECK(s1.valid == s2.valid);
  CHECK(s1.test == s2.test);

  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  auto add = [&](const std::vector<Pair>& v) {
    for (const Pair& p : v) CHECK(seen.insert({p.user, p.item}).second);
  };
  add(s1.train);
  add(s1.valid);
  add(s1.test);
  CHECK(seen.size() == ds.pairs.size());

  // Per-user interaction counts below 3 keep everything in train.
  std::vector<std::size_t> count(ds.num_users, 0);
  for (const Pair& p : ds.pairs) ++count[p.user];
  for (const Pair& p : s1.valid) CHECK(count[p.user] >= 3);
  for (const Pair& p : s1.test) CHECK(count[p.user] >= 3);
}

TEST_CASE("negative sampling") {
  const auto ds = test::random_bipartite(6, 15, 0.2, 23);
  auto split = split_dataset(ds, {0.8, 0.1, 0.1}, 1);
  sample_negatives(split, ds, 5, 2);
  REQUIRE(split.negatives.size() == split.train.size());
  std::set<std::pair<std::uint32_t, std::uint32_t>> observed;
  for (const Pair& p : ds.pairs) observed.insert({p.user, p.item});
  for (std::size_t t = 0; t < split.train.size(); ++t) {
    CHECK(split.negatives[t].size() == 5);
    for (std::uint32_t i : split.negatives[t])
      CHECK(!observed.count({split.train[t].user, i}));
  }

  auto split2 = split_dataset(ds, {0.8, 0.1, 0.1}, 1);
  sample_negatives(split2, ds, 5, 2);
  CHECK(split.negatives == split2.negatives);
}

TEST_CASE("negative sampling forced and exhausted cases") {
  InteractionDataset ds;
  ds.num_users = 1;
  ds.num_items = 2;
  ds.pairs = {{0, 0}};
  auto split = split_dataset(ds, {1.0, 0.0, 0.0}, 1);
  sample_negatives(split, ds, 1, 9);
  CHECK(split.negatives[0] == std::vector<std::uint32_t>{1});

  InteractionDataset full;
  full.num_users = 1;
  full.num_items = 2;
  full.pairs = {{0, 0}, {0, 1}};
  auto fsplit = split_dataset(full, {1.0, 0.0, 0.0}, 1);
  CHECK_THROWS(sample_negatives(fsplit, full, 1, 9));
}

TEST_CASE("split artifact roundtrip") {
  const auto ds = test::random_bipartite(7, 11, 0.2, 31);
  auto split = split_dataset(ds, {0.8, 0.1, 0.1}, 4);
  sample_negatives(split, ds, 3, 5);
  save_split("lerg_test_split.bin", ds, split);

  InteractionDataset ds2;
  DatasetSplit split2;
  load_split("lerg_test_split.bin", ds2, split2);
  std::remove("lerg_test_split.bin");

  CHECK(ds2.num_users == ds.num_users);
  CHECK(ds2.num_items == ds.num_items);
  CHECK(split2.train == split.train);
  CHECK(split2.valid == split.valid);
  CHECK(split2.test == split.test);
  CHECK(split2.negatives == split.negatives);
  std::set<std::pair<std::uint32_t, std::uint32_t>> a, b;
  for (const Pair& p : ds.pairs) a.insert({p.user, p.item});
  for (const Pair& p : ds2.pairs) b.insert({p.user, p.item});
  CHECK(a == b);
}
