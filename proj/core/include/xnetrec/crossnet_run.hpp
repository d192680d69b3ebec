#pragma once

// Temporal training and evaluation protocol for the cross-network model.
//
// Intervals 1..n train, n+1..n+m test. A training instance pairs the streams
// visible up to interval t with the target-network ground truth of t + 1.
// Test intervals are evaluated one after another; after each one its ground
// truth is used for a few incremental epochs before the next.

#include <functional>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "xnetrec/crossnet.hpp"
#include "xnetrec/data.hpp"
#include "xnetrec/report.hpp"
#include "xnetrec/synth.hpp"

namespace xnetrec {

struct CrossNetData {
  IntervalGrid grid;
  int topics = 0;
  std::vector<UserRecord> users;  // sorted by id
  std::vector<ItemId> catalog;    // target-network items, sorted
  std::vector<Interaction> target;
  std::map<int, std::map<UserId, std::set<ItemId>>> positives;  // target ground truth per interval
  std::map<ItemId, std::vector<double>> item_topics;            // empty when unknown

  static CrossNetData from_synth(const SynthDataset& ds);

  // Streams are rebuilt from the snapshot table (missing intervals are zero
  // vectors). Target snapshots of New users are ignored. Throws DataError when
  // a user has no kind or snapshot lengths disagree.
  static CrossNetData assemble(const IntervalGrid& grid, std::span<const Interaction> interactions,
                               std::span<const TopicalSnapshot> snapshots, const std::map<UserId, UserKind>& kinds,
                               std::map<ItemId, std::vector<double>> item_topics = {});

  std::vector<UserId> existing_users() const;
  const UserRecord& user(UserId id) const;
};

struct CrossNetRunConfig {
  CrossNetConfig model;
  int epochs = 30;
  int train_intervals = 10;
  int test_intervals = 2;
  double negative_ratio = 4.0;  // sampled negatives per positive; 0 = full catalog
  int incremental_epochs = 2;
  EvalOptions eval;

  void validate(const CrossNetData& data) const;
};

// Instances predicting `target_interval` for every user active there.
std::vector<CrossNetInstance> make_instances(const CrossNetData& data, int target_interval, double negative_ratio,
                                             std::uint64_t seed);

using CrossNetEpochCallback = std::function<void(const EpochLosses&, const CrossNetModel&)>;

struct CrossNetTrainResult {
  CrossNetModel model;
  std::vector<EpochLosses> trace;
};

CrossNetModel make_model(const CrossNetData& data, const CrossNetRunConfig& config);

// Trains from scratch on intervals 2..n as prediction targets.
CrossNetTrainResult train_crossnet(const CrossNetData& data, const CrossNetRunConfig& config,
                                   const CrossNetEpochCallback& on_epoch = {});

// Evaluates the test intervals in order, fine-tuning `model` between them.
EvalReport evaluate_crossnet(CrossNetModel& model, const CrossNetData& data, const CrossNetRunConfig& config);

// phi(s, s) for every non-zero short-term vector of the test intervals.
std::vector<double> held_out_self_attention(const CrossNetModel& model, const CrossNetData& data,
                                            const CrossNetRunConfig& config);

}  // namespace xnetrec
