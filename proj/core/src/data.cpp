#include "xnetrec/data.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ranges>
#include <sstream>
#include <string_view>

#include "xnetrec/errors.hpp"
#include "xnetrec/random.hpp"

namespace xnetrec {

std::string to_string(Network n) { return n == Network::Source ? "source" : "target"; }

Network network_from_string(const std::string& s) {
  if (s == "source") return Network::Source;
  if (s == "target") return Network::Target;
  throw DataError("unknown network '" + s + "'");
}

std::string to_string(Granularity g) { return g == Granularity::Biweekly ? "biweekly" : "monthly"; }

Granularity granularity_from_string(const std::string& s) {
  if (s == "biweekly") return Granularity::Biweekly;
  if (s == "monthly") return Granularity::Monthly;
  throw ConfigError("unknown granularity '" + s + "'");
}

std::string to_string(UserKind k) { return k == UserKind::New ? "new" : "existing"; }

UserKind user_kind_from_string(const std::string& s) {
  if (s == "new") return UserKind::New;
  if (s == "existing") return UserKind::Existing;
  throw DataError("unknown user kind '" + s + "'");
}

// ---- IntervalGrid ------------------------------------------------------------

namespace {

using std::chrono::days;
using std::chrono::sys_days;
using std::chrono::sys_seconds;

int month_ordinal(Timestamp ts) {
  const auto day = std::chrono::floor<days>(sys_seconds{std::chrono::seconds{ts}});
  const std::chrono::year_month_day ymd{day};
  return static_cast<int>(ymd.year()) * 12 + static_cast<int>(static_cast<unsigned>(ymd.month())) - 1;
}

Timestamp month_start(int ordinal) {
  const std::chrono::year y{ordinal / 12};
  const std::chrono::month m{static_cast<unsigned>(ordinal % 12 + 1)};
  const sys_days d{y / m / std::chrono::day{1}};
  return std::chrono::duration_cast<std::chrono::seconds>(d.time_since_epoch()).count();
}

}  // namespace

int IntervalGrid::index_of(Timestamp ts) const {
  if (ts < origin) return 0;
  std::int64_t idx = 0;
  if (granularity == Granularity::Biweekly) {
    idx = (ts - origin) / kBiweeklySeconds + 1;
  } else {
    idx = month_ordinal(ts) - month_ordinal(origin) + 1;
  }
  return idx > count ? 0 : static_cast<int>(idx);
}

Timestamp IntervalGrid::interval_start(int index) const {
  if (index <= 1) return origin;
  if (granularity == Granularity::Biweekly) return origin + static_cast<Timestamp>(index - 1) * kBiweeklySeconds;
  return month_start(month_ordinal(origin) + index - 1);
}

IntervalGrid IntervalGrid::covering(std::span<const Interaction> interactions, Granularity g) {
  if (interactions.empty()) throw DataError("cannot build an interval grid over no interactions");
  auto [lo, hi] = std::ranges::minmax(interactions | std::views::transform(&Interaction::timestamp));
  IntervalGrid grid{lo, g, 1};
  if (g == Granularity::Biweekly) {
    grid.count = static_cast<int>((hi - lo) / kBiweeklySeconds + 1);
  } else {
    grid.count = month_ordinal(hi) - month_ordinal(lo) + 1;
  }
  return grid;
}

// ---- ingestion -----------------------------------------------------------------

namespace {

template <typename T>
bool parse_number(std::string_view field, T& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_rating(std::string_view field) {
  double rating = 0.0;
  if (parse_number(field, rating)) return std::isfinite(rating);
  // from_chars for double is incomplete on some toolchains; fall back.
  try {
    std::size_t used = 0;
    rating = std::stod(std::string(field), &used);
    return used == field.size() && std::isfinite(rating);
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

std::vector<Interaction> ingest_movielens(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");

  std::vector<Interaction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (;;) {
      const auto pos = rest.find("::");
      fields.push_back(rest.substr(0, pos));
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 2);
    }
    const auto fail = [&](const std::string& why) {
      return DataError(path.string() + ":" + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() != 4) {
      throw fail("expected 4 '::'-separated fields, found " + std::to_string(fields.size()));
    }
    Interaction rec;
    if (!parse_number(fields[0], rec.user)) throw fail("bad user id");
    if (!parse_number(fields[1], rec.item)) throw fail("bad item id");
    if (!parse_rating(fields[2])) throw fail("bad rating");
    if (!parse_number(fields[3], rec.timestamp) || rec.timestamp < 0) throw fail("bad timestamp");
    rec.network = Network::Target;
    out.push_back(rec);
  }
  if (out.empty()) throw DataError(path.string() + ": no records");
  return out;
}

std::vector<Interaction> binarize(std::span<const Interaction> interactions) {
  std::map<std::tuple<UserId, ItemId, Network>, std::size_t> first;
  std::vector<Interaction> out;
  out.reserve(interactions.size());
  for (const auto& rec : interactions) {
    const auto key = std::make_tuple(rec.user, rec.item, rec.network);
    auto [it, inserted] = first.try_emplace(key, out.size());
    if (inserted) {
      out.push_back(rec);
    } else {
      auto& kept = out[it->second];
      kept.timestamp = std::min(kept.timestamp, rec.timestamp);
    }
  }
  return out;
}

// ---- time ------------------------------------------------------------------------

std::map<int, std::vector<Interaction>> slice_intervals(std::span<const Interaction> interactions,
                                                        const IntervalGrid& grid) {
  std::map<int, std::vector<Interaction>> buckets;
  std::vector<const Interaction*> offenders;
  for (const auto& rec : interactions) {
    const int idx = grid.index_of(rec.timestamp);
    if (idx == 0) {
      offenders.push_back(&rec);
      continue;
    }
    buckets[idx].push_back(rec);
  }
  if (!offenders.empty()) {
    std::ostringstream msg;
    msg << offenders.size() << " interaction(s) outside the interval grid:";
    constexpr std::size_t kShown = 10;
    for (std::size_t i = 0; i < std::min(kShown, offenders.size()); ++i) {
      msg << " (user " << offenders[i]->user << ", item " << offenders[i]->item << ", ts "
          << offenders[i]->timestamp << ")";
    }
    if (offenders.size() > kShown) msg << " ...";
    throw DataError(msg.str());
  }
  return buckets;
}

TemporalSplit temporal_split(const IntervalGrid& grid, const TemporalSplitConfig& config) {
  if (config.train_intervals <= 0) throw ConfigError("empty training window");
  if (config.test_intervals <= 0) throw ConfigError("empty test window");
  if (config.train_intervals + config.test_intervals > grid.count) {
    throw ConfigError("split needs " + std::to_string(config.train_intervals + config.test_intervals) +
                      " intervals but the grid has " + std::to_string(grid.count));
  }
  TemporalSplit split;
  split.train.resize(config.train_intervals);
  std::iota(split.train.begin(), split.train.end(), 1);
  split.test.resize(config.test_intervals);
  std::iota(split.test.begin(), split.test.end(), config.train_intervals + 1);
  return split;
}

// ---- random holdout ----------------------------------------------------------------

HoldoutSplit random_holdout(std::span<const Interaction> interactions, double fraction,
                            std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("holdout fraction must lie in (0, 1), got " + std::to_string(fraction));
  }
  const auto pairs = binarize(interactions);
  const auto users = distinct_users(pairs);
  const auto items = distinct_items(pairs);

  HoldoutSplit split;

  // Positives: shuffle indices and cut.
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  auto pos_rng = make_rng(seed, {0x706f73});
  std::shuffle(order.begin(), order.end(), pos_rng);
  const auto n_test_pos = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(pairs.size())));
  std::vector<bool> held(pairs.size(), false);
  for (std::size_t i = 0; i < n_test_pos; ++i) held[order[i]] = true;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    (held[i] ? split.test_positives : split.train).push_back(pairs[i]);
  }

  // Negatives: uniform sample without replacement over the enumerated
  // complement of the interaction matrix (users x items, row-major).
  std::map<UserId, std::vector<ItemId>> seen;
  for (const auto& p : pairs) seen[p.user].push_back(p.item);
  for (auto& [u, v] : seen) std::ranges::sort(v);

  const auto total = static_cast<std::uint64_t>(users.size()) * items.size();
  const std::uint64_t n_neg = total - pairs.size();
  const auto n_test_neg = static_cast<std::uint64_t>(std::floor(fraction * static_cast<double>(n_neg)));
  std::vector<std::uint64_t> picks;
  picks.reserve(n_test_neg);
  auto neg_rng = make_rng(seed, {0x6e6567});
  // Selection sampling keeps the picks in ascending order.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::uint64_t i = 0; i < n_neg && picks.size() < n_test_neg; ++i) {
    const auto need = static_cast<double>(n_test_neg - picks.size());
    if (static_cast<double>(n_neg - i) * unit(neg_rng) < need) picks.push_back(i);
  }

  // Walk the complement in the same order, emitting picked ordinals.
  split.test_negatives.reserve(picks.size());
  std::size_t next = 0;
  std::uint64_t ordinal = 0;
  for (UserId u : users) {
    const auto& mine = seen[u];
    std::size_t seen_pos = 0;
    for (ItemId item : items) {
      if (next == picks.size()) break;
      if (seen_pos < mine.size() && mine[seen_pos] == item) {
        ++seen_pos;
        continue;
      }
      if (picks[next] == ordinal) {
        split.test_negatives.emplace_back(u, item);
        ++next;
      }
      ++ordinal;
    }
  }
  return split;
}

// ---- listwise instances --------------------------------------------------------------

std::size_t NegativePolicy::sample_size(std::size_t positives, std::size_t available) const {
  if (kind == Kind::Full) return available;
  const auto wanted = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(positives) + 1e-9));
  return std::min(wanted, available);
}

std::string to_string(const NegativePolicy& p) {
  if (p.kind == NegativePolicy::Kind::Full) return "full";
  std::ostringstream s;
  s << "sample:" << p.ratio;
  return s.str();
}

NegativePolicy negative_policy_from_string(const std::string& s, std::uint64_t seed) {
  if (s == "full") return NegativePolicy::full();
  constexpr std::string_view prefix = "sample:";
  if (s.starts_with(prefix)) {
    double ratio = 0.0;
    try {
      ratio = std::stod(s.substr(prefix.size()));
    } catch (const std::exception&) {
      throw ConfigError("bad negative policy '" + s + "'");
    }
    if (!(ratio > 0.0)) throw ConfigError("negative sampling ratio must be positive");
    return NegativePolicy::sample(ratio, seed);
  }
  throw ConfigError("bad negative policy '" + s + "' (expected full or sample:<ratio>)");
}

InstanceSet build_listwise_instances(std::span<const UserId> users, int target_interval,
                                     const std::map<UserId, std::set<ItemId>>& positives_at_target,
                                     std::span<const ItemId> catalog, const NegativePolicy& policy) {
  if (catalog.empty()) throw ConfigError("empty catalog");
  InstanceSet out;
  for (UserId u : users) {
    const auto it = positives_at_target.find(u);
    if (it == positives_at_target.end() || it->second.empty()) {
      ++out.skipped_users;
      continue;
    }
    ListwiseInstance inst;
    inst.user = u;
    inst.target_interval = target_interval;
    inst.positives.assign(it->second.begin(), it->second.end());

    std::vector<ItemId> pool;
    pool.reserve(catalog.size());
    for (ItemId i : catalog) {
      if (!it->second.contains(i)) pool.push_back(i);
    }
    const std::size_t n = policy.sample_size(inst.positives.size(), pool.size());
    if (n == pool.size()) {
      inst.negatives = std::move(pool);
    } else {
      auto rng = make_rng(policy.seed, {static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(target_interval)});
      inst.negatives.reserve(n);
      std::ranges::sample(pool, std::back_inserter(inst.negatives), static_cast<std::ptrdiff_t>(n), rng);
    }
    out.instances.push_back(std::move(inst));
  }
  return out;
}

std::vector<UserId> distinct_users(std::span<const Interaction> interactions) {
  std::vector<UserId> ids;
  ids.reserve(interactions.size());
  for (const auto& r : interactions) ids.push_back(r.user);
  std::ranges::sort(ids);
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::vector<ItemId> distinct_items(std::span<const Interaction> interactions) {
  std::vector<ItemId> ids;
  ids.reserve(interactions.size());
  for (const auto& r : interactions) ids.push_back(r.item);
  std::ranges::sort(ids);
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

}  // namespace xnetrec
