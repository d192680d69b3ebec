#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "xnetrec/errors.hpp"
#include "xnetrec/metrics.hpp"

using namespace xnetrec;

namespace {

using Vec = std::vector<double>;

double pair_count_auc(const Vec& pos, const Vec& neg) {
  double hits = 0.0;
  for (double p : pos) {
    for (double n : neg) hits += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  }
  return hits / static_cast<double>(pos.size() * neg.size());
}

Vec coarse(std::mt19937_64& rng, std::size_t n) {
  // Few distinct values so ties are frequent.
  Vec v(n);
  for (double& x : v) x = static_cast<double>(rng() % 7) / 4.0;
  return v;
}

}  // namespace

TEST(Auc, Examples) {
  EXPECT_EQ(auc_user(Vec{0.9}, Vec{0.1, 0.2}), 1.0);
  EXPECT_EQ(auc_user(Vec{0.6, 0.2}, Vec{0.4, 0.1}), 0.75);
  EXPECT_EQ(auc_user(Vec{0.5}, Vec{0.5}), 0.5);
  EXPECT_FALSE(auc_user(Vec{}, Vec{0.5}).has_value());
  EXPECT_FALSE(auc_user(Vec{0.5}, Vec{}).has_value());
}

TEST(Auc, EqualsPairCountingOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto pos = coarse(rng, 1 + rng() % 30);
    const auto neg = coarse(rng, 1 + rng() % 30);
    EXPECT_EQ(*auc_user(pos, neg), pair_count_auc(pos, neg));
  }
}

TEST(Auc, InvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    auto pos = coarse(rng, 1 + rng() % 20);
    auto neg = coarse(rng, 1 + rng() % 20);
    const double before = *auc_user(pos, neg);
    for (double& x : pos) x = std::exp(3 * x) - 7;
    for (double& x : neg) x = std::exp(3 * x) - 7;
    EXPECT_EQ(*auc_user(pos, neg), before);
  }
}

TEST(HitRatio, Examples) {
  const std::vector<ItemId> top = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_EQ(hit_ratio(top, {3}, 10), 1.0);
  EXPECT_EQ(hit_ratio(top, {11}, 10), 0.0);
  EXPECT_EQ(hit_ratio(top, {1, 4, 9, 20, 21}, 10), 0.6);
  EXPECT_EQ(hit_ratio(std::vector<ItemId>{1, 2}, {1, 2, 3, 4}, 2), 1.0);
  EXPECT_FALSE(hit_ratio(top, {}, 10).has_value());
  EXPECT_THROW(hit_ratio(top, {1}, 5), ConfigError);
}

TEST(HitRatio, MonotoneInN) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::map<ItemId, double> scores;
    for (ItemId i = 1; i <= 50; ++i) scores[i] = static_cast<double>(rng() % 100);
    std::set<ItemId> positives;
    for (int k = 0; k < 12; ++k) positives.insert(1 + static_cast<ItemId>(rng() % 50));
    // Hits counted, so the per-n denominator does not mask the trend.
    std::size_t prev = 0;
    for (std::size_t n = 1; n <= 50; ++n) {
      const auto top = top_n(scores, n);
      const std::size_t hits = static_cast<std::size_t>(
          std::llround(*hit_ratio(top, positives, n) * static_cast<double>(std::min(n, positives.size()))));
      EXPECT_GE(hits, prev);
      prev = hits;
    }
  }
}

TEST(TopN, OrderingTiesAndExclusion) {
  EXPECT_EQ(top_n({{1, 0.9}, {2, 0.8}}, 1), std::vector<ItemId>{1});
  EXPECT_EQ(top_n({{1, 0.9}, {2, 0.8}}, 1, {1}), std::vector<ItemId>{2});
  EXPECT_EQ(top_n({{2, 0.5}, {1, 0.5}}, 2), (std::vector<ItemId>{1, 2}));
  EXPECT_EQ(top_n({{1, 0.1}}, 5), std::vector<ItemId>{1});
}

TEST(TopN, MatchesOracleSort) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::map<ItemId, double> scores;
    for (ItemId i = 1; i <= 40; ++i) scores[i] = static_cast<double>(rng() % 5);
    std::set<ItemId> exclude = {static_cast<ItemId>(1 + rng() % 40)};
    std::vector<std::pair<double, ItemId>> oracle;
    for (const auto& [i, s] : scores) {
      if (!exclude.contains(i)) oracle.emplace_back(-s, i);
    }
    std::sort(oracle.begin(), oracle.end());
    const auto got = top_n(scores, 10, exclude);
    ASSERT_EQ(got.size(), 10u);
    for (std::size_t k = 0; k < 10; ++k) EXPECT_EQ(got[k], oracle[k].second);
  }
}

TEST(Novelty, HandComputedCorpus) {
  const std::vector<Interaction> train = {{1, 1, 0, Network::Target}, {2, 2, 0, Network::Target}};
  const auto pop = ItemPopularity::from(train);
  EXPECT_EQ(pop.share(1), 0.5);
  EXPECT_NEAR(pop.share(99), 1.0 / 3.0, 1e-15);
  const std::vector<std::vector<ItemId>> lists = {{1}, {1}};
  EXPECT_DOUBLE_EQ(novelty(lists, pop), 1.0);
  const std::vector<std::vector<ItemId>> unseen = {{99}};
  EXPECT_DOUBLE_EQ(novelty(unseen, pop), std::log2(3.0));
  EXPECT_GT(novelty(unseen, pop), novelty(lists, pop));
  const std::vector<std::vector<ItemId>> mixed = {{1, 99}};
  const std::vector<std::vector<ItemId>> doubled = {{1, 99}, {1, 99}};
  EXPECT_EQ(novelty(mixed, pop), novelty(doubled, pop));
}

TEST(Diversity, PairwiseCosineOracle) {
  const double r = 1.0 / std::sqrt(2.0);
  const std::map<ItemId, Vec> topics = {{1, {1, 0}}, {2, {0, 1}}, {3, {r, r}}, {4, {1, 0}}};
  EXPECT_EQ(diversity(std::vector<std::vector<ItemId>>{{1, 4}}, topics), 0.0);
  EXPECT_DOUBLE_EQ(diversity(std::vector<std::vector<ItemId>>{{1, 2}}, topics), 1.0);
  const double expect = (1.0 + 2 * (1.0 - std::sqrt(2.0) / 2.0)) / 3.0;
  EXPECT_NEAR(diversity(std::vector<std::vector<ItemId>>{{1, 2, 3}}, topics), expect, 1e-12);
  EXPECT_NEAR(expect, 0.5286, 1e-4);
  EXPECT_DOUBLE_EQ(diversity(std::vector<std::vector<ItemId>>{{1, 2}, {1}}, topics), 0.5);
  EXPECT_THROW(diversity(std::vector<std::vector<ItemId>>{{1, 7}}, topics), DataError);
}
