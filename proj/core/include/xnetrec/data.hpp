#pragma once

// Implicit-feedback records, interval grids, temporal/random splits and
// listwise training instances.

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace xnetrec {

using UserId = std::int64_t;
using ItemId = std::int64_t;
using Timestamp = std::int64_t;  // seconds since epoch

enum class Network { Source, Target };

std::string to_string(Network n);
Network network_from_string(const std::string& s);

struct Interaction {
  UserId user = 0;
  ItemId item = 0;
  Timestamp timestamp = 0;
  Network network = Network::Target;

  friend bool operator==(const Interaction&, const Interaction&) = default;
  friend auto operator<=>(const Interaction&, const Interaction&) = default;
};

enum class Granularity { Biweekly, Monthly };

std::string to_string(Granularity g);
Granularity granularity_from_string(const std::string& s);

// Partition of time into `count` consecutive intervals starting at `origin`.
// Biweekly intervals are fixed 14-day windows anchored at the origin; monthly
// intervals follow calendar months, the first one starting at the origin.
struct IntervalGrid {
  Timestamp origin = 0;
  Granularity granularity = Granularity::Biweekly;
  int count = 1;

  // 1-based interval index, or 0 when `ts` falls outside the grid.
  int index_of(Timestamp ts) const;
  // First timestamp belonging to interval `index` (index may be count + 1,
  // which yields the exclusive end of the grid).
  Timestamp interval_start(int index) const;
  Timestamp end() const { return interval_start(count + 1); }

  // Smallest grid of the given granularity that covers every interaction.
  static IntervalGrid covering(std::span<const Interaction> interactions, Granularity g);
};

constexpr Timestamp kSecondsPerDay = 86400;
constexpr Timestamp kBiweeklySeconds = 14 * kSecondsPerDay;

// Per-user, per-interval topical frequency vector.
struct TopicalSnapshot {
  UserId user = 0;
  int interval = 1;
  Network network = Network::Source;
  std::vector<double> frequencies;
};

enum class UserKind { New, Existing };

std::string to_string(UserKind k);
UserKind user_kind_from_string(const std::string& s);

// Topical streams of one user, indexed by interval - 1. New users carry no
// target stream; consumers must dispatch on `kind`, never on stream presence.
struct UserRecord {
  UserId id = 0;
  UserKind kind = UserKind::Existing;
  std::vector<std::vector<double>> source_stream;
  std::vector<std::vector<double>> target_stream;
};

struct ListwiseInstance {
  UserId user = 0;
  int target_interval = 0;
  std::vector<ItemId> positives;
  std::vector<ItemId> negatives;
};

// ---- ingestion -----------------------------------------------------------

// Parses `UserID::MovieID::Rating::Timestamp` lines. The rating must be
// numeric but is not retained: every record becomes a Target interaction.
std::vector<Interaction> ingest_movielens(const std::filesystem::path& path);

// Collapses repeated (user, item, network) events to one interaction, keeping
// the earliest timestamp. Output order is first-occurrence order.
std::vector<Interaction> binarize(std::span<const Interaction> interactions);

// ---- time ------------------------------------------------------------------

// Buckets interactions by interval. Throws DataError naming offenders when a
// timestamp falls outside the grid.
std::map<int, std::vector<Interaction>> slice_intervals(std::span<const Interaction> interactions,
                                                        const IntervalGrid& grid);

struct TemporalSplitConfig {
  int train_intervals = 0;
  int test_intervals = 0;
};

struct TemporalSplit {
  std::vector<int> train;
  std::vector<int> test;
};

TemporalSplit temporal_split(const IntervalGrid& grid, const TemporalSplitConfig& config);

// ---- random holdout ----------------------------------------------------------

struct HoldoutSplit {
  std::vector<Interaction> train;
  std::vector<Interaction> test_positives;
  // Held-out non-interacted (user, item) pairs, sorted.
  std::vector<std::pair<UserId, ItemId>> test_negatives;
};

// Holds out floor(fraction * |pairs|) interacted pairs and the same fraction of
// the non-interacted user x item pairs. Users and catalog are those present in
// `interactions`, which are binarized first.
HoldoutSplit random_holdout(std::span<const Interaction> interactions, double fraction,
                            std::uint64_t seed);

// ---- listwise instances ------------------------------------------------------

struct NegativePolicy {
  enum class Kind { Full, Sample };
  Kind kind = Kind::Full;
  double ratio = 4.0;
  std::uint64_t seed = 0;

  static NegativePolicy full() { return {Kind::Full, 0.0, 0}; }
  static NegativePolicy sample(double ratio, std::uint64_t seed) { return {Kind::Sample, ratio, seed}; }

  // Number of negatives drawn for `positives` positives out of `available`.
  std::size_t sample_size(std::size_t positives, std::size_t available) const;
};

std::string to_string(const NegativePolicy& p);
// Parses "full" or "sample:<ratio>"; the seed is supplied separately.
NegativePolicy negative_policy_from_string(const std::string& s, std::uint64_t seed);

struct InstanceSet {
  std::vector<ListwiseInstance> instances;
  std::size_t skipped_users = 0;
};

// One instance per user with at least one interaction at `target_interval`.
// Negatives come from `catalog` minus the user's positives; sampled lists keep
// catalog order.
InstanceSet build_listwise_instances(std::span<const UserId> users, int target_interval,
                                     const std::map<UserId, std::set<ItemId>>& positives_at_target,
                                     std::span<const ItemId> catalog, const NegativePolicy& policy);

// Sorted distinct ids.
std::vector<UserId> distinct_users(std::span<const Interaction> interactions);
std::vector<ItemId> distinct_items(std::span<const Interaction> interactions);

}  // namespace xnetrec
