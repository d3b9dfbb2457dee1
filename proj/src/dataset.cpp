#include "lerg/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "lerg/rng.hpp"
#include "lerg/serialize.hpp"

namespace lerg {

namespace {

constexpr char kSplitMagic[8] = {'L', 'E', 'R', 'G', 'S', 'P', 'L', 'T'};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

InteractionDataset load_interactions(const std::string& path, PairFormat fmt) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open interactions file: " + path);
  const char sep = fmt == PairFormat::tsv_pairs ? '\t' : ',';

  InteractionDataset ds;
  std::unordered_map<std::string, std::uint32_t> user_ids, item_ids;
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::size_t cut = line.find(sep);
    // Tab-separated files in the wild sometimes use runs of spaces; accept
    // whitespace as a separator for tsv when no tab is present.
    if (cut == std::string::npos && fmt == PairFormat::tsv_pairs)
      cut = line.find(' ');
    if (cut == std::string::npos)
      throw std::runtime_error("malformed interaction line " +
                               std::to_string(lineno) + " in " + path);
    const std::string ut = trim(line.substr(0, cut));
    const std::string it = trim(line.substr(cut + 1));
    if (ut.empty() || it.empty())
      throw std::runtime_error("malformed interaction line " +
                               std::to_string(lineno) + " in " + path);
    auto [uit, unew] = user_ids.try_emplace(
        ut, static_cast<std::uint32_t>(user_ids.size()));
    auto [iit, inew] = item_ids.try_emplace(
        it, static_cast<std::uint32_t>(item_ids.size()));
    if (seen.emplace(uit->second, iit->second).second)
      ds.pairs.push_back({uit->second, iit->second});
  }
  ds.num_users = user_ids.size();
  ds.num_items = item_ids.size();
  if (ds.pairs.empty())
    throw std::runtime_error("no interactions found in " + path);
  return ds;
}

DatasetSplit split_dataset(const InteractionDataset& ds, SplitRatios ratios,
                           std::uint64_t seed) {
  require(ratios.train >= 0 && ratios.valid >= 0 && ratios.test >= 0,
          "split ratios must be nonnegative");
  const double sum = ratios.train + ratios.valid + ratios.test;
  if (sum <= 0.0) throw std::invalid_argument("split ratios sum to zero");
  const double valid_r = ratios.valid / sum;
  const double test_r = ratios.test / sum;

  std::vector<std::vector<std::uint32_t>> by_user(ds.num_users);
  for (std::size_t k = 0; k < ds.pairs.size(); ++k)
    by_user[ds.pairs[k].user].push_back(ds.pairs[k].item);

  DatasetSplit split;
  Rng rng(seed);
  for (std::uint32_t u = 0; u < ds.num_users; ++u) {
    auto& items = by_user[u];
    if (items.empty()) continue;
    std::sort(items.begin(), items.end());
    rng.shuffle(items);
    std::size_t n_valid = 0, n_test = 0;
    if (items.size() >= 3) {
      n_valid = static_cast<std::size_t>(
          std::llround(valid_r * static_cast<double>(items.size())));
      n_test = static_cast<std::size_t>(
          std::llround(test_r * static_cast<double>(items.size())));
      // Keep at least one training interaction per user.
      while (n_valid + n_test >= items.size()) {
        if (n_test > 0) --n_test;
        else --n_valid;
      }
    }
    const std::size_t n_train = items.size() - n_valid - n_test;
    for (std::size_t k = 0; k < items.size(); ++k) {
      Pair p{u, items[k]};
      if (k < n_train) split.train.push_back(p);
      else if (k < n_train + n_valid) split.valid.push_back(p);
      else split.test.push_back(p);
    }
  }
  return split;
}

void sample_negatives(DatasetSplit& split, const InteractionDataset& ds,
                      std::size_t k, std::uint64_t seed) {
  require(k >= 1, "negative count must be >= 1");
  std::vector<std::unordered_set<std::uint32_t>> observed(ds.num_users);
  auto note = [&](const std::vector<Pair>& ps) {
    for (const Pair& p : ps) observed[p.user].insert(p.item);
  };
  note(split.train);
  note(split.valid);
  note(split.test);

  Rng rng(seed);
  split.negatives.assign(split.train.size(), {});
  for (std::size_t t = 0; t < split.train.size(); ++t) {
    const std::uint32_t u = split.train[t].user;
    if (observed[u].size() >= ds.num_items)
      throw std::runtime_error(
          "cannot sample negatives: user " + std::to_string(u) +
          " interacted with every item");
    auto& negs = split.negatives[t];
    negs.reserve(k);
    while (negs.size() < k) {
      const auto cand =
          static_cast<std::uint32_t>(rng.uniform_index(ds.num_items));
      if (observed[u].count(cand) == 0) negs.push_back(cand);
    }
  }
}

void save_split(const std::string& path, const InteractionDataset& ds,
                const DatasetSplit& split) {
  io::Writer w(path);
  w.magic(kSplitMagic);
  w.pod<std::uint32_t>(1);
  w.pod<std::uint64_t>(ds.num_users);
  w.pod<std::uint64_t>(ds.num_items);
  auto put_pairs = [&](const std::vector<Pair>& ps) {
    w.pod<std::uint64_t>(ps.size());
    for (const Pair& p : ps) {
      w.pod<std::uint32_t>(p.user);
      w.pod<std::uint32_t>(p.item);
    }
  };
  put_pairs(split.train);
  put_pairs(split.valid);
  put_pairs(split.test);
  w.pod<std::uint64_t>(split.negatives.size());
  const std::uint64_t k =
      split.negatives.empty() ? 0 : split.negatives.front().size();
  w.pod<std::uint64_t>(k);
  for (const auto& negs : split.negatives) {
    if (negs.size() != k)
      throw std::runtime_error("ragged negatives cannot be serialized");
    w.array(negs.data(), negs.size());
  }
  w.close();
}

void load_split(const std::string& path, InteractionDataset& ds,
                DatasetSplit& split) {
  io::Reader r(path);
  r.expect_magic(kSplitMagic, "dataset split");
  const auto version = r.pod<std::uint32_t>();
  if (version != 1) throw std::runtime_error("unsupported split version");
  ds = {};
  split = {};
  ds.num_users = r.pod<std::uint64_t>();
  ds.num_items = r.pod<std::uint64_t>();
  auto get_pairs = [&](std::vector<Pair>& ps) {
    const auto n = r.pod<std::uint64_t>();
    ps.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      Pair p{};
      p.user = r.pod<std::uint32_t>();
      p.item = r.pod<std::uint32_t>();
      ps.push_back(p);
    }
  };
  get_pairs(split.train);
  get_pairs(split.valid);
  get_pairs(split.test);
  const auto rows = r.pod<std::uint64_t>();
  const auto k = r.pod<std::uint64_t>();
  split.negatives.resize(rows);
  for (auto& negs : split.negatives) negs = r.array<std::uint32_t>(k);
  ds.pairs = split.train;
  ds.pairs.insert(ds.pairs.end(), split.valid.begin(), split.valid.end());
  ds.pairs.insert(ds.pairs.end(), split.test.begin(), split.test.end());
}

}  // namespace lerg
