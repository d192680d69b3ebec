#include <gtest/gtest.h>

#include "xnetrec/crossnet_run.hpp"
#include "xnetrec/errors.hpp"
#include "xnetrec/synth.hpp"

using namespace xnetrec;

namespace {

SynthConfig synth() {
  SynthConfig c;
  c.users = 24;
  c.items = 40;
  c.topics = 8;
  c.intervals = 6;
  c.base_sparsity = 0.6;
  c.seed = 3;
  return c;
}

CrossNetRunConfig run_config() {
  CrossNetRunConfig r;
  r.model.topics = 8;
  r.model.k = 4;
  r.model.item_dim = 4;
  r.model.user_dim = 2;
  r.model.adam.learning_rate = 0.01;
  r.epochs = 3;
  r.train_intervals = 4;
  r.test_intervals = 2;
  r.incremental_epochs = 1;
  return r;
}

}  // namespace

TEST(CrossNetData, FromSynth) {
  const auto ds = generate(synth());
  const auto d = CrossNetData::from_synth(ds);
  EXPECT_EQ(d.topics, 8);
  EXPECT_EQ(d.catalog.size(), 40u);
  EXPECT_TRUE(std::is_sorted(d.catalog.begin(), d.catalog.end()));
  EXPECT_EQ(d.existing_users().size(), 12u);
  for (const auto& r : d.target) {
    EXPECT_EQ(r.network, Network::Target);
    EXPECT_TRUE(d.positives.at(d.grid.index_of(r.timestamp)).at(r.user).contains(r.item));
  }
  EXPECT_THROW(d.user(999), DataError);
}

TEST(CrossNetData, AssembleMatchesSynthStreams) {
  const auto ds = generate(synth());
  const auto d = CrossNetData::assemble(ds.grid, ds.interactions, ds.snapshots(), ds.kinds(), ds.target_item_topics());
  const auto ref = CrossNetData::from_synth(ds);
  ASSERT_EQ(d.users.size(), ref.users.size());
  for (std::size_t i = 0; i < d.users.size(); ++i) {
    EXPECT_EQ(d.users[i].id, ref.users[i].id);
    EXPECT_EQ(d.users[i].kind, ref.users[i].kind);
    EXPECT_EQ(d.users[i].source_stream, ref.users[i].source_stream);
    EXPECT_EQ(d.users[i].target_stream, ref.users[i].target_stream);
  }
  EXPECT_EQ(d.catalog, ref.catalog);
  EXPECT_EQ(d.positives, ref.positives);
}

TEST(CrossNetData, AssembleIgnoresNewUserTargetSnapshotsAndChecksKinds) {
  const IntervalGrid grid{0, Granularity::Biweekly, 2};
  const std::vector<TopicalSnapshot> snaps = {{1, 1, Network::Source, {1, 0}},
                                              {1, 2, Network::Target, {0, 5}},
                                              {2, 2, Network::Target, {0, 1}}};
  const std::vector<Interaction> rows = {{1, 7, 3, Network::Target}};
  const auto d = CrossNetData::assemble(grid, rows, snaps, {{1, UserKind::New}, {2, UserKind::Existing}});
  EXPECT_TRUE(d.user(1).target_stream.empty());
  EXPECT_EQ(d.user(1).source_stream, (std::vector<std::vector<double>>{{1, 0}, {0, 0}}));
  EXPECT_EQ(d.user(2).target_stream[1], (std::vector<double>{0, 1}));
  EXPECT_THROW(CrossNetData::assemble(grid, rows, snaps, {{1, UserKind::New}}), DataError);
}

TEST(CrossNetRun, InstancesSkipInactiveUsers) {
  const auto d = CrossNetData::from_synth(generate(synth()));
  const auto insts = make_instances(d, 3, 4.0, 1);
  ASSERT_FALSE(insts.empty());
  for (const auto& inst : insts) {
    const auto& u = d.users[inst.user];
    EXPECT_EQ(inst.history, 2);
    const auto& pos = d.positives.at(3).at(u.id);
    EXPECT_EQ(inst.positives.size(), pos.size());
    EXPECT_EQ(inst.negatives.size(), std::min<std::size_t>(4 * pos.size(), d.catalog.size() - pos.size()));
    for (ItemId i : inst.negatives) EXPECT_FALSE(pos.contains(i));
  }
  EXPECT_EQ(insts.size(), d.positives.at(3).size());
  const auto full = make_instances(d, 3, 0.0, 1);
  EXPECT_EQ(full[0].negatives.size(), d.catalog.size() - full[0].positives.size());
}

TEST(CrossNetRun, ConfigValidation) {
  const auto d = CrossNetData::from_synth(generate(synth()));
  auto r = run_config();
  r.model.topics = 9;
  EXPECT_THROW(r.validate(d), ConfigError);
  r = run_config();
  r.train_intervals = 5;
  EXPECT_THROW(r.validate(d), ConfigError);
  r = run_config();
  r.train_intervals = 1;
  r.test_intervals = 1;
  EXPECT_THROW(r.validate(d), ConfigError);
}

TEST(CrossNetRun, TrainAndEvaluateDeterministically) {
  const auto d = CrossNetData::from_synth(generate(synth()));
  const auto cfg = run_config();
  int calls = 0;
  auto a = train_crossnet(d, cfg, [&](const EpochLosses&, const CrossNetModel&) { ++calls; });
  auto b = train_crossnet(d, cfg);
  EXPECT_EQ(calls, 3);
  ASSERT_EQ(a.trace.size(), 3u);
  EXPECT_EQ(a.trace.back().lw_new, b.trace.back().lw_new);
  const auto ra = evaluate_crossnet(a.model, d, cfg);
  const auto rb = evaluate_crossnet(b.model, d, cfg);
  EXPECT_EQ(ra.per_user().size(), rb.per_user().size());
  for (std::size_t i = 0; i < ra.per_user().size(); ++i) EXPECT_EQ(ra.per_user()[i].value, rb.per_user()[i].value);
  const auto s = ra.summary();
  EXPECT_TRUE(s.contains("hr@10"));
  EXPECT_TRUE(s.contains("auc"));
  EXPECT_EQ(ra.metadata().at("variant"), "full");
  for (double x : held_out_self_attention(a.model, d, cfg)) {
    EXPECT_GT(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}
