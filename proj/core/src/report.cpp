#include "xnetrec/report.hpp"

#include <algorithm>
#include <fstream>

#include "xnetrec/errors.hpp"
#include "xnetrec/io.hpp"

namespace xnetrec {

void EvalReport::record(UserId user, const std::string& metric, std::optional<double> value) {
  if (value) {
    per_user_.push_back({user, metric, *value});
  } else {
    excluded_[metric].insert(user);
  }
}

EvalReport EvalReport::merge(std::span<const EvalReport> reports) {
  std::map<std::string, std::map<UserId, std::pair<double, int>>> sums;
  std::map<std::string, std::set<UserId>> excluded;
  EvalReport out;
  for (const auto& r : reports) {
    for (const auto& m : r.per_user_) {
      auto& [sum, n] = sums[m.metric][m.user];
      sum += m.value;
      ++n;
    }
    for (const auto& [name, users] : r.excluded_) excluded[name].insert(users.begin(), users.end());
    for (const auto& [k, v] : r.metadata_) out.metadata_[k] = v;
  }
  for (const auto& [name, users] : sums) {
    for (const auto& [user, acc] : users) out.per_user_.push_back({user, name, acc.first / acc.second});
  }
  for (const auto& [name, users] : excluded) {
    for (UserId u : users) {
      if (!sums[name].contains(u)) out.excluded_[name].insert(u);
    }
  }
  return out;
}

std::map<std::string, MetricSummary> EvalReport::summary() const {
  std::map<std::string, MetricSummary> out;
  for (const auto& m : per_user_) {
    auto& s = out[m.metric];
    s.mean += m.value;
    ++s.users;
  }
  for (auto& [name, s] : out) {
    if (s.users > 0) s.mean /= static_cast<double>(s.users);
  }
  for (const auto& [name, users] : excluded_) out[name].excluded = users.size();
  return out;
}

void EvalReport::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::map<std::string, std::vector<const UserMetric*>> by_metric;
  for (const auto& m : per_user_) by_metric[m.metric].push_back(&m);
  for (const auto& [name, s] : summary()) by_metric.try_emplace(name);
  for (auto& [name, rows] : by_metric) {
    std::stable_sort(rows.begin(), rows.end(), [](const UserMetric* a, const UserMetric* b) { return a->user < b->user; });
    std::ofstream out(dir / (name + ".csv"), std::ios::binary);
    if (!out) throw DataError("cannot write report into '" + dir.string() + "'");
    out << "user,metric,value\n";
    for (const auto* m : rows) out << m->user << ',' << m->metric << ',' << io::format_real(m->value) << '\n';
  }
  std::ofstream sum(dir / "summary.csv", std::ios::binary);
  sum << "metric,mean,users,excluded\n";
  for (const auto& [name, s] : summary()) {
    sum << name << ',' << io::format_real(s.mean) << ',' << s.users << ',' << s.excluded << '\n';
  }
  std::ofstream meta(dir / "metadata.csv", std::ios::binary);
  meta << "key,value\n";
  for (const auto& [k, v] : metadata_) meta << k << ',' << v << '\n';
}

const std::set<std::string>& known_metrics() {
  static const std::set<std::string> names = {"hr", "auc", "novelty", "diversity"};
  return names;
}

std::string hr_name(std::size_t n) { return "hr@" + std::to_string(n); }

EvalReport evaluate(const BatchScorer& scorer, const EvalTask& task, const EvalOptions& options) {
  for (const auto& m : options.metrics) {
    if (!known_metrics().contains(m)) throw ConfigError("unknown metric '" + m + "'");
  }
  if (options.metrics.contains("diversity") && task.item_topics == nullptr) {
    throw DataError("diversity needs item topic vectors, which this dataset does not provide");
  }
  const bool want_hr = options.metrics.contains("hr");
  const bool want_auc = options.metrics.contains("auc");
  const bool want_nov = options.metrics.contains("novelty");
  const bool want_div = options.metrics.contains("diversity");
  const bool want_list = want_hr || want_nov || want_div;
  static const std::set<ItemId> kNone;
  static const std::vector<ItemId> kNoItems;

  EvalReport report;
  for (const auto& [user, positives] : task.test_positives) {
    const auto neg_it = task.test_negatives.find(user);
    const auto& negatives = neg_it == task.test_negatives.end() ? kNoItems : neg_it->second;
    const auto ex_it = task.exclude.find(user);
    const auto& excluded = ex_it == task.exclude.end() ? kNone : ex_it->second;

    // Score the union of catalog and test items once.
    std::set<ItemId> wanted;
    if (want_list) wanted.insert(task.catalog.begin(), task.catalog.end());
    if (want_auc) {
      wanted.insert(positives.begin(), positives.end());
      wanted.insert(negatives.begin(), negatives.end());
    }
    const std::vector<ItemId> items(wanted.begin(), wanted.end());
    const auto scores = scorer(user, items);
    if (scores.size() != items.size()) throw ShapeError("scorer returned the wrong number of scores");
    std::map<ItemId, double> score_of;
    for (std::size_t k = 0; k < items.size(); ++k) score_of.emplace_hint(score_of.end(), items[k], scores[k]);

    if (want_auc) {
      std::vector<double> ps;
      std::vector<double> ns;
      for (ItemId i : positives) ps.push_back(score_of.at(i));
      for (ItemId i : negatives) ns.push_back(score_of.at(i));
      report.record(user, "auc", auc_user(ps, ns));
    }
    if (want_list) {
      std::map<ItemId, double> candidates;
      for (ItemId i : task.catalog) candidates.emplace(i, score_of.at(i));
      const auto top = top_n(candidates, options.n, excluded);
      if (want_hr) report.record(user, hr_name(options.n), hit_ratio(top, positives, options.n));
      const std::vector<std::vector<ItemId>> one{top};
      if (want_nov) report.record(user, "novelty", top.empty() ? std::nullopt : std::optional(novelty(one, task.popularity)));
      if (want_div) report.record(user, "diversity", top.empty() ? std::nullopt : std::optional(diversity(one, *task.item_topics)));
    }
  }
  report.set_metadata("top_n", std::to_string(options.n));
  return report;
}

EvalTask holdout_task(const HoldoutSplit& split) {
  EvalTask task;
  task.catalog = distinct_items(split.train);
  task.popularity = ItemPopularity::from(split.train);
  for (const auto& r : split.test_positives) task.test_positives[r.user].insert(r.item);
  for (const auto& [u, i] : split.test_negatives) task.test_negatives[u].push_back(i);
  for (const auto& r : split.train) task.exclude[r.user].insert(r.item);
  return task;
}

EvalTask temporal_task(std::span<const Interaction> train, std::span<const Interaction> test) {
  EvalTask task;
  task.catalog = distinct_items(train);
  task.popularity = ItemPopularity::from(train);
  for (const auto& r : train) task.exclude[r.user].insert(r.item);
  for (const auto& r : test) task.test_positives[r.user].insert(r.item);
  for (const auto& [user, positives] : task.test_positives) {
    const auto& seen = task.exclude[user];
    auto& neg = task.test_negatives[user];
    for (ItemId i : task.catalog) {
      if (!positives.contains(i) && !seen.contains(i)) neg.push_back(i);
    }
  }
  return task;
}

}  // namespace xnetrec
