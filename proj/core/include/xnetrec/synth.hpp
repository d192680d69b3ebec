#pragma once

// Deterministic two-network topical interaction generator.
//
// Every user has a latent topic preference made of a stable profile plus a
// drift direction whose weight grows by `drift_rate` per interval. During each
// outlier interval an off-profile topic is boosted by `outlier_strength` and
// dropped again afterwards. Per interval and network, the number of events is
// Poisson with mean (1 - base_sparsity) * items / intervals, and items are drawn
// without replacement with probability proportional to preference . topics.
// Source and target networks have separate catalogs and independent noise.
//
// All randomness comes from streams derived from (seed, user, interval,
// network, purpose), so changing one interval never perturbs another.

#include <cstdint>
#include <map>
#include <vector>

#include "xnetrec/data.hpp"

namespace xnetrec {

struct SynthConfig {
  int users = 200;
  int items = 300;
  int topics = 64;
  int intervals = 12;
  double new_user_fraction = 0.5;
  double base_sparsity = 0.9;
  std::vector<int> outlier_intervals;
  double outlier_strength = 0.0;
  double drift_rate = 0.0;
  std::uint64_t seed = 1;
  Timestamp origin = 1425168000;  // 2015-03-01T00:00:00Z

  // Throws ConfigError on counts < 1, fractions outside (0,1), negative rates
  // or outlier intervals outside [1, intervals].
  void validate() const;
};

struct CatalogItem {
  ItemId id = 0;
  std::vector<double> topics;  // sums to 1, at most three non-zero entries
};

struct SynthDataset {
  SynthConfig config;
  IntervalGrid grid;
  std::vector<UserRecord> users;  // sorted by id
  std::vector<CatalogItem> target_catalog;
  std::vector<CatalogItem> source_catalog;
  // Ground truth for both networks and every user, including the target-network
  // activity of New users (which never appears in their UserRecord).
  std::vector<Interaction> interactions;

  // Snapshot table rows: the source stream of every user and the target stream
  // of Existing users, ordered by (user, network, interval).
  std::vector<TopicalSnapshot> snapshots() const;
  std::map<UserId, UserKind> kinds() const;
  std::map<ItemId, std::vector<double>> target_item_topics() const;
};

SynthDataset generate(const SynthConfig& config);

}  // namespace xnetrec
