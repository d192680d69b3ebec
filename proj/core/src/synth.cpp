#include "xnetrec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "xnetrec/errors.hpp"
#include "xnetrec/matrix.hpp"
#include "xnetrec/random.hpp"

namespace xnetrec {

namespace {

constexpr int kTopicsPerItem = 3;
constexpr int kProfileTopics = 3;
constexpr int kDriftTopics = 2;
constexpr double kPreferenceFloor = 0.05;  // mass spread uniformly over all topics

// Stream purposes.
enum Purpose : std::uint64_t {
  kItemTopics = 1,
  kProfile,
  kDrift,
  kOutlier,
  kCount,
  kChoice,
  kTime,
};

std::uint64_t u64(std::int64_t v) { return static_cast<std::uint64_t>(v); }

// Distinct topics drawn uniformly from those not in `taken`.
std::vector<int> draw_topics(Rng& rng, int topics, int n, const std::vector<int>& taken) {
  std::vector<int> pool;
  for (int c = 0; c < topics; ++c) {
    if (std::ranges::find(taken, c) == taken.end()) pool.push_back(c);
  }
  std::vector<int> out;
  std::ranges::sample(pool, std::back_inserter(out), std::min<std::ptrdiff_t>(n, std::ssize(pool)), rng);
  return out;
}

// Sparse simplex sample: exponential weights on `support`, normalized.
std::vector<double> simplex_on(Rng& rng, int topics, const std::vector<int>& support) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> v(topics, 0.0);
  double total = 0.0;
  for (int c : support) {
    v[c] = expo(rng) + 1e-3;
    total += v[c];
  }
  for (double& x : v) x /= total;
  return v;
}

void normalize(std::vector<double>& v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= total;
}

std::vector<CatalogItem> make_catalog(const SynthConfig& cfg, Network net) {
  std::vector<CatalogItem> items;
  items.reserve(cfg.items);
  for (int j = 1; j <= cfg.items; ++j) {
    auto rng = make_rng(cfg.seed, {kItemTopics, static_cast<std::uint64_t>(net), u64(j)});
    const auto support = draw_topics(rng, cfg.topics, kTopicsPerItem, {});
    items.push_back({j, simplex_on(rng, cfg.topics, support)});
  }
  return items;
}

struct LatentUser {
  std::vector<int> profile_topics;
  std::vector<int> drift_topics;
  std::vector<double> base;
  std::vector<double> drift;
};

LatentUser make_latent(const SynthConfig& cfg, UserId u) {
  LatentUser l;
  auto rng = make_rng(cfg.seed, {kProfile, u64(u)});
  l.profile_topics = draw_topics(rng, cfg.topics, kProfileTopics, {});
  l.base = simplex_on(rng, cfg.topics, l.profile_topics);
  for (double& x : l.base) x = (1.0 - kPreferenceFloor) * x + kPreferenceFloor / cfg.topics;

  auto drift_rng = make_rng(cfg.seed, {kDrift, u64(u)});
  l.drift_topics = draw_topics(drift_rng, cfg.topics, kDriftTopics, l.profile_topics);
  l.drift = l.drift_topics.empty() ? std::vector<double>(cfg.topics, 0.0)
                                   : simplex_on(drift_rng, cfg.topics, l.drift_topics);
  return l;
}

std::vector<double> preference_at(const SynthConfig& cfg, const LatentUser& l, UserId u, int t) {
  std::vector<double> p = l.base;
  const double w = cfg.drift_rate * (t - 1);
  for (int c = 0; c < cfg.topics; ++c) p[c] += w * l.drift[c];
  if (std::ranges::find(cfg.outlier_intervals, t) != cfg.outlier_intervals.end()) {
    auto rng = make_rng(cfg.seed, {kOutlier, u64(u), u64(t)});
    std::vector<int> taken = l.profile_topics;
    taken.insert(taken.end(), l.drift_topics.begin(), l.drift_topics.end());
    const auto off = draw_topics(rng, cfg.topics, 1, taken);
    if (!off.empty()) p[off.front()] += cfg.outlier_strength;
  }
  normalize(p);
  return p;
}

// Weighted sampling without replacement (exponential-key method).
std::vector<std::size_t> draw_items(Rng& rng, const std::vector<double>& weights, std::size_t n) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::pair<double, std::size_t>> keys;
  keys.reserve(weights.size());
  for (std::size_t j = 0; j < weights.size(); ++j) {
    const double r = unif(rng);
    // Larger key wins; log(r)/w is monotone in r^(1/w).
    keys.emplace_back(weights[j] > 0.0 ? std::log(std::max(r, 1e-300)) / weights[j] : -INFINITY, j);
  }
  n = std::min(n, keys.size());
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(n), keys.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(keys[i].second);
  std::ranges::sort(out);
  return out;
}

}  // namespace

void SynthConfig::validate() const {
  if (users < 1) throw ConfigError("synth: users must be >= 1");
  if (items < 1) throw ConfigError("synth: items must be >= 1");
  if (topics < 1) throw ConfigError("synth: topics must be >= 1");
  if (intervals < 1) throw ConfigError("synth: intervals must be >= 1");
  if (!(new_user_fraction > 0.0 && new_user_fraction < 1.0)) throw ConfigError("synth: new_user_fraction must lie in (0,1)");
  if (!(base_sparsity > 0.0 && base_sparsity < 1.0)) throw ConfigError("synth: base_sparsity must lie in (0,1)");
  if (!(outlier_strength >= 0.0)) throw ConfigError("synth: outlier_strength must be >= 0");
  if (!(drift_rate >= 0.0)) throw ConfigError("synth: drift_rate must be >= 0");
  for (int t : outlier_intervals) {
    if (t < 1 || t > intervals) throw ConfigError("synth: outlier interval " + std::to_string(t) + " outside [1, intervals]");
  }
  if (origin < 0) throw ConfigError("synth: origin must be >= 0");
}

SynthDataset generate(const SynthConfig& config) {
  config.validate();
  SynthDataset ds;
  ds.config = config;
  ds.grid = IntervalGrid{config.origin, Granularity::Biweekly, config.intervals};
  ds.target_catalog = make_catalog(config, Network::Target);
  ds.source_catalog = make_catalog(config, Network::Source);

  const double rate = (1.0 - config.base_sparsity) * config.items / config.intervals;
  std::map<UserId, std::size_t> target_counts;

  for (UserId u = 1; u <= config.users; ++u) {
    const auto latent = make_latent(config, u);
    UserRecord rec;
    rec.id = u;
    rec.source_stream.assign(config.intervals, std::vector<double>(config.topics, 0.0));
    rec.target_stream.assign(config.intervals, std::vector<double>(config.topics, 0.0));
    target_counts[u] = 0;

    for (int t = 1; t <= config.intervals; ++t) {
      const auto pref = preference_at(config, latent, u, t);
      for (Network net : {Network::Source, Network::Target}) {
        const auto& catalog = net == Network::Source ? ds.source_catalog : ds.target_catalog;
        auto count_rng = make_rng(config.seed, {kCount, u64(u), u64(t), static_cast<std::uint64_t>(net)});
        const auto n = static_cast<std::size_t>(std::poisson_distribution<int>(rate)(count_rng));
        if (n == 0) continue;

        std::vector<double> weights(catalog.size());
        for (std::size_t j = 0; j < catalog.size(); ++j) weights[j] = dot(pref, catalog[j].topics);
        auto choice_rng = make_rng(config.seed, {kChoice, u64(u), u64(t), static_cast<std::uint64_t>(net)});
        auto time_rng = make_rng(config.seed, {kTime, u64(u), u64(t), static_cast<std::uint64_t>(net)});
        std::uniform_int_distribution<Timestamp> offset(0, kBiweeklySeconds - 1);

        auto& snapshot = (net == Network::Source ? rec.source_stream : rec.target_stream)[t - 1];
        for (std::size_t j : draw_items(choice_rng, weights, n)) {
          ds.interactions.push_back({u, catalog[j].id, ds.grid.interval_start(t) + offset(time_rng), net});
          axpy(1.0, catalog[j].topics, snapshot);
          if (net == Network::Target) ++target_counts[u];
        }
      }
    }
    ds.users.push_back(std::move(rec));
  }

  // Fewest target interactions first; that half becomes New.
  std::vector<UserId> order;
  for (const auto& r : ds.users) order.push_back(r.id);
  std::ranges::stable_sort(order, [&](UserId a, UserId b) { return target_counts[a] < target_counts[b]; });
  const auto n_new = static_cast<std::size_t>(std::llround(config.new_user_fraction * config.users));
  for (std::size_t i = 0; i < n_new && i < order.size(); ++i) {
    auto& rec = ds.users[static_cast<std::size_t>(order[i] - 1)];
    rec.kind = UserKind::New;
    rec.target_stream.clear();
  }
  return ds;
}

std::vector<TopicalSnapshot> SynthDataset::snapshots() const {
  std::vector<TopicalSnapshot> rows;
  for (const auto& u : users) {
    for (std::size_t t = 0; t < u.source_stream.size(); ++t) {
      rows.push_back({u.id, static_cast<int>(t + 1), Network::Source, u.source_stream[t]});
    }
    if (u.kind == UserKind::Existing) {
      for (std::size_t t = 0; t < u.target_stream.size(); ++t) {
        rows.push_back({u.id, static_cast<int>(t + 1), Network::Target, u.target_stream[t]});
      }
    }
  }
  return rows;
}

std::map<UserId, UserKind> SynthDataset::kinds() const {
  std::map<UserId, UserKind> out;
  for (const auto& u : users) out[u.id] = u.kind;
  return out;
}

std::map<ItemId, std::vector<double>> SynthDataset::target_item_topics() const {
  std::map<ItemId, std::vector<double>> out;
  for (const auto& item : target_catalog) out[item.id] = item.topics;
  return out;
}

}  // namespace xnetrec
