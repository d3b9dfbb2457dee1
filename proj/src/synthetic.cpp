#include "lerg/synthetic.hpp"

#include <set>

#include "lerg/rng.hpp"

namespace lerg {

InteractionDataset make_synthetic(const SyntheticSpec& spec) {
  require(spec.communities >= 1, "need at least one community");
  require(spec.num_items >= spec.communities, "more communities than items");
  InteractionDataset ds;
  ds.num_users = spec.num_users;
  ds.num_items = spec.num_items;

  Rng rng(spec.seed);
  // Community of user u / item i: round-robin over index.
  auto user_comm = [&](std::size_t u) { return u % spec.communities; };

  std::vector<std::vector<std::uint32_t>> comm_items(spec.communities);
  for (std::size_t i = 0; i < spec.num_items; ++i)
    comm_items[i % spec.communities].push_back(
        static_cast<std::uint32_t>(i));

  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  const std::size_t jitter = spec.interactions_per_user / 2 + 1;
  for (std::size_t u = 0; u < spec.num_users; ++u) {
    const std::size_t base = spec.interactions_per_user - jitter / 2;
    const std::size_t want = base + rng.uniform_index(jitter);
    const auto& local = comm_items[user_comm(u)];
    std::size_t attempts = 0;
    std::size_t got = 0;
    while (got < want && attempts < want * 20) {
      ++attempts;
      std::uint32_t item;
      if (rng.uniform_real(0.0, 1.0) < spec.intra_prob) {
        item = local[rng.uniform_index(local.size())];
      } else {
        item = static_cast<std::uint32_t>(rng.uniform_index(spec.num_items));
      }
      if (seen.emplace(static_cast<std::uint32_t>(u), item).second) {
        ds.pairs.push_back({static_cast<std::uint32_t>(u), item});
        ++got;
      }
    }
  }
  return ds;
}

}  // namespace lerg
