#pragma once

// Evaluation harness and report assembly.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "xnetrec/data.hpp"
#include "xnetrec/metrics.hpp"

namespace xnetrec {

struct UserMetric {
  UserId user = 0;
  std::string metric;
  double value = 0.0;
};

struct MetricSummary {
  double mean = 0.0;
  std::size_t users = 0;     // users contributing a value
  std::size_t excluded = 0;  // users with nothing to measure
};

class EvalReport {
 public:
  // nullopt counts the user as excluded for that metric.
  void record(UserId user, const std::string& metric, std::optional<double> value);
  void set_metadata(const std::string& key, const std::string& value) { metadata_[key] = value; }

  const std::vector<UserMetric>& per_user() const { return per_user_; }
  // Arithmetic mean of the recorded per-user values.
  std::map<std::string, MetricSummary> summary() const;
  const std::map<std::string, std::string>& metadata() const { return metadata_; }

  // Per (user, metric) mean over the given reports. A user counts as excluded
  // for a metric only when no report has a value for it.
  static EvalReport merge(std::span<const EvalReport> reports);

  // Writes <metric>.csv (user,metric,value) per metric, summary.csv
  // (metric,mean,users,excluded) and metadata.csv (key,value).
  void write(const std::filesystem::path& dir) const;

 private:
  std::vector<UserMetric> per_user_;
  std::map<std::string, std::set<UserId>> excluded_;
  std::map<std::string, std::string> metadata_;
};

// Everything needed to score a model on held-out data.
struct EvalTask {
  std::vector<ItemId> catalog;                            // candidates for top-N
  std::map<UserId, std::set<ItemId>> test_positives;      // users evaluated = keys
  std::map<UserId, std::vector<ItemId>> test_negatives;   // AUC negatives
  std::map<UserId, std::set<ItemId>> exclude;             // never recommended
  ItemPopularity popularity;                              // training popularity
  const std::map<ItemId, std::vector<double>>* item_topics = nullptr;
};

struct EvalOptions {
  std::size_t n = 10;
  std::set<std::string> metrics = {"hr", "auc", "novelty"};
};

// Scores of `items` for `user`, same order.
using BatchScorer = std::function<std::vector<double>(UserId user, std::span<const ItemId> items)>;

// Throws ConfigError for unknown metric names and DataError if diversity is
// requested without item topics.
EvalReport evaluate(const BatchScorer& scorer, const EvalTask& task, const EvalOptions& options);

// Metric names accepted by evaluate().
const std::set<std::string>& known_metrics();
std::string hr_name(std::size_t n);

// Task for a random holdout: AUC over held-out positives vs held-out
// negatives, top-N over the training catalog minus each user's training items.
EvalTask holdout_task(const HoldoutSplit& split);

// Task for a temporal split: test positives are interactions in the test
// window; AUC negatives are catalog items the user never touched.
EvalTask temporal_task(std::span<const Interaction> train, std::span<const Interaction> test);

}  // namespace xnetrec
