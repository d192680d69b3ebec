#include "xnetrec/crossnet_run.hpp"

#include <algorithm>

#include "xnetrec/errors.hpp"
#include "xnetrec/random.hpp"

namespace xnetrec {

namespace {

std::map<int, std::map<UserId, std::set<ItemId>>> bucket_target(std::span<const Interaction> target,
                                                                 const IntervalGrid& grid) {
  std::map<int, std::map<UserId, std::set<ItemId>>> out;
  for (const auto& [interval, records] : slice_intervals(target, grid)) {
    for (const auto& r : records) out[interval][r.user].insert(r.item);
  }
  return out;
}

}  // namespace

CrossNetData CrossNetData::from_synth(const SynthDataset& ds) {
  CrossNetData d;
  d.grid = ds.grid;
  d.topics = ds.config.topics;
  d.users = ds.users;
  for (const auto& item : ds.target_catalog) d.catalog.push_back(item.id);
  std::sort(d.catalog.begin(), d.catalog.end());
  for (const auto& r : ds.interactions) {
    if (r.network == Network::Target) d.target.push_back(r);
  }
  d.positives = bucket_target(d.target, d.grid);
  d.item_topics = ds.target_item_topics();
  return d;
}

CrossNetData CrossNetData::assemble(const IntervalGrid& grid, std::span<const Interaction> interactions,
                                    std::span<const TopicalSnapshot> snapshots,
                                    const std::map<UserId, UserKind>& kinds,
                                    std::map<ItemId, std::vector<double>> item_topics) {
  CrossNetData d;
  d.grid = grid;
  d.item_topics = std::move(item_topics);
  std::set<ItemId> catalog;
  for (const auto& r : interactions) {
    if (r.network != Network::Target) continue;
    d.target.push_back(r);
    catalog.insert(r.item);
  }
  for (const auto& [item, topics] : d.item_topics) catalog.insert(item);
  d.catalog.assign(catalog.begin(), catalog.end());
  d.positives = bucket_target(d.target, grid);

  std::set<UserId> ids;
  for (const auto& s : snapshots) ids.insert(s.user);
  for (const auto& [u, kind] : kinds) ids.insert(u);
  for (const auto& r : d.target) ids.insert(r.user);
  if (!snapshots.empty()) d.topics = static_cast<int>(snapshots.front().frequencies.size());
  if (d.topics == 0) throw DataError("no topical snapshots to build user streams from");

  const auto count = static_cast<std::size_t>(grid.count);
  const std::vector<std::vector<double>> zeros(count, std::vector<double>(static_cast<std::size_t>(d.topics), 0.0));
  std::map<UserId, UserRecord> records;
  for (UserId u : ids) {
    const auto kind = kinds.find(u);
    if (kind == kinds.end()) throw DataError("user " + std::to_string(u) + " has no user kind");
    UserRecord rec;
    rec.id = u;
    rec.kind = kind->second;
    rec.source_stream = zeros;
    if (rec.kind == UserKind::Existing) rec.target_stream = zeros;
    records.emplace(u, std::move(rec));
  }
  for (const auto& s : snapshots) {
    if (s.frequencies.size() != static_cast<std::size_t>(d.topics)) {
      throw DataError("snapshot of user " + std::to_string(s.user) + " has " + std::to_string(s.frequencies.size()) +
                      " topics, expected " + std::to_string(d.topics));
    }
    if (s.interval < 1 || s.interval > grid.count) {
      throw DataError("snapshot of user " + std::to_string(s.user) + " at interval " + std::to_string(s.interval) +
                      " lies outside the grid");
    }
    auto& rec = records.at(s.user);
    if (s.network == Network::Source) {
      rec.source_stream[s.interval - 1] = s.frequencies;
    } else if (rec.kind == UserKind::Existing) {
      rec.target_stream[s.interval - 1] = s.frequencies;
    }
  }
  for (auto& [u, rec] : records) d.users.push_back(std::move(rec));
  return d;
}

std::vector<UserId> CrossNetData::existing_users() const {
  std::vector<UserId> out;
  for (const auto& u : users) {
    if (u.kind == UserKind::Existing) out.push_back(u.id);
  }
  return out;
}

const UserRecord& CrossNetData::user(UserId id) const {
  const auto it = std::lower_bound(users.begin(), users.end(), id, [](const UserRecord& r, UserId v) { return r.id < v; });
  if (it == users.end() || it->id != id) throw DataError("unknown user " + std::to_string(id));
  return *it;
}

void CrossNetRunConfig::validate(const CrossNetData& data) const {
  model.validate();
  if (model.topics != data.topics) {
    throw ConfigError("model expects " + std::to_string(model.topics) + " topics but the data has " +
                      std::to_string(data.topics));
  }
  if (epochs < 0 || incremental_epochs < 0) throw ConfigError("epoch counts must be non-negative");
  if (train_intervals < 2) throw ConfigError("crossnet training needs at least 2 training intervals");
  if (negative_ratio < 0.0) throw ConfigError("negative ratio must be non-negative");
  temporal_split(data.grid, {train_intervals, test_intervals});
}

std::vector<CrossNetInstance> make_instances(const CrossNetData& data, int target_interval, double negative_ratio,
                                             std::uint64_t seed) {
  static const std::map<UserId, std::set<ItemId>> kNone;
  const auto it = data.positives.find(target_interval);
  const auto& positives = it == data.positives.end() ? kNone : it->second;
  std::vector<UserId> ids;
  for (const auto& u : data.users) ids.push_back(u.id);
  const auto policy = negative_ratio > 0.0 ? NegativePolicy::sample(negative_ratio, seed) : NegativePolicy::full();
  auto set = build_listwise_instances(ids, target_interval, positives, data.catalog, policy);
  std::vector<CrossNetInstance> out;
  for (auto& inst : set.instances) {
    if (inst.negatives.empty()) continue;
    const auto pos = std::lower_bound(ids.begin(), ids.end(), inst.user);
    out.push_back({static_cast<std::size_t>(pos - ids.begin()), target_interval - 1, std::move(inst.positives),
                   std::move(inst.negatives)});
  }
  return out;
}

CrossNetModel make_model(const CrossNetData& data, const CrossNetRunConfig& config) {
  config.validate(data);
  return CrossNetModel(config.model, data.existing_users(), data.catalog);
}

namespace {

std::vector<CrossNetInstance> instances_for(const CrossNetData& data, int first, int last, double ratio,
                                            std::uint64_t seed) {
  std::vector<CrossNetInstance> out;
  for (int t = first; t <= last; ++t) {
    auto more = make_instances(data, t, ratio, seed);
    std::move(more.begin(), more.end(), std::back_inserter(out));
  }
  return out;
}

}  // namespace

CrossNetTrainResult train_crossnet(const CrossNetData& data, const CrossNetRunConfig& config,
                                   const CrossNetEpochCallback& on_epoch) {
  CrossNetTrainResult result{make_model(data, config), {}};
  const auto seed = config.model.seed;
  for (int e = 0; e < config.epochs; ++e) {
    const auto instances = instances_for(data, 2, config.train_intervals, config.negative_ratio,
                                         derive_seed(seed, {0x6e6567, static_cast<std::uint64_t>(e)}));
    result.trace.push_back(result.model.train_epoch(data.users, instances));
    if (on_epoch) on_epoch(result.trace.back(), result.model);
  }
  return result;
}

EvalReport evaluate_crossnet(CrossNetModel& model, const CrossNetData& data, const CrossNetRunConfig& config) {
  config.validate(data);
  const auto split = temporal_split(data.grid, {config.train_intervals, config.test_intervals});

  std::vector<Interaction> train_target;
  for (const auto& r : data.target) {
    const int t = data.grid.index_of(r.timestamp);
    if (t >= 1 && t <= config.train_intervals) train_target.push_back(r);
  }
  const auto popularity = ItemPopularity::from(train_target);

  std::vector<EvalReport> reports;
  for (std::size_t j = 0; j < split.test.size(); ++j) {
    const int interval = split.test[j];
    EvalTask task;
    task.catalog = data.catalog;
    task.popularity = popularity;
    if (!data.item_topics.empty()) task.item_topics = &data.item_topics;
    if (const auto it = data.positives.find(interval); it != data.positives.end()) {
      task.test_positives = it->second;
    }
    for (const auto& [user, positives] : task.test_positives) {
      auto& neg = task.test_negatives[user];
      for (ItemId i : data.catalog) {
        if (!positives.contains(i)) neg.push_back(i);
      }
    }
    const BatchScorer scorer = [&](UserId user, std::span<const ItemId> items) {
      return model.score(data.user(user), interval - 1, items);
    };
    reports.push_back(evaluate(scorer, task, config.eval));

    if (j + 1 < split.test.size()) {
      for (int e = 0; e < config.incremental_epochs; ++e) {
        const auto instances = make_instances(
            data, interval, config.negative_ratio,
            derive_seed(config.model.seed, {0x696e63, static_cast<std::uint64_t>(interval), static_cast<std::uint64_t>(e)}));
        model.train_epoch(data.users, instances);
      }
    }
  }
  auto merged = EvalReport::merge(reports);
  merged.set_metadata("model", "crossnet");
  merged.set_metadata("variant", to_string(model.config().variant));
  merged.set_metadata("seed", std::to_string(config.model.seed));
  merged.set_metadata("top_n", std::to_string(config.eval.n));
  return merged;
}

std::vector<double> held_out_self_attention(const CrossNetModel& model, const CrossNetData& data,
                                            const CrossNetRunConfig& config) {
  const auto split = temporal_split(data.grid, {config.train_intervals, config.test_intervals});
  std::vector<double> out;
  for (const auto& user : data.users) {
    for (int t : split.test) {
      const auto scores = model.self_attention(user, t);
      out.insert(out.end(), scores.begin(), scores.end());
    }
  }
  return out;
}

}  // namespace xnetrec
