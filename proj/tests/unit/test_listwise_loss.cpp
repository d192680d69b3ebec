#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "xnetrec/errors.hpp"
#include "xnetrec/listwise_loss.hpp"
#include "xnetrec/nn.hpp"

using namespace xnetrec;

namespace {

using Vec = std::vector<double>;

// Loss written straight from the definition, two passes, no shared code.
double oracle_loss(const Vec& pos, const Vec& neg) {
  const auto stats = [](const Vec& r) {
    double m = 0.0;
    for (double x : r) m += x;
    m /= static_cast<double>(r.size());
    double v = 0.0;
    for (double x : r) v += (x - m) * (x - m);
    return std::pair{m, v / static_cast<double>(r.size())};
  };
  const auto [mp, vp] = stats(pos);
  const auto [mn, vn] = stats(neg);
  return (1 - mp) * (1 - mp) + mn * mn + vp + vn;
}

Vec uniform(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST(ClassStats, Examples) {
  const Vec ones = {1, 1, 1};
  EXPECT_EQ(class_stats(ones).mean, 1.0);
  EXPECT_EQ(class_stats(ones).variance, 0.0);
  const Vec three = {0.2, 0.4, 0.6};
  const auto s = class_stats(three);
  EXPECT_NEAR(s.mean, 0.4, 1e-15);
  EXPECT_NEAR(s.variance, (0.04 + 0.0 + 0.04) / 3.0, 1e-15);
  EXPECT_EQ(s.count, 3u);
  const Vec single = {0.7};
  EXPECT_EQ(class_stats(single).variance, 0.0);
  try {
    class_stats({});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_STREQ(e.what(), "empty class");
  }
}

TEST(ListwiseLoss, Examples) {
  EXPECT_EQ(listwise_loss(Vec{1, 1}, Vec{0, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(listwise_loss(Vec{0.5, 0.5}, Vec{0.5}), 0.5);
  EXPECT_NEAR(listwise_loss(Vec{0.8, 0.6}, Vec{0.1, 0.3}), 0.09 + 0.04 + 0.01 + 0.01, 1e-15);
  EXPECT_THROW(listwise_loss(Vec{}, Vec{0.1}), ConfigError);
  EXPECT_THROW(listwise_loss(Vec{0.1}, Vec{}), ConfigError);
}

TEST(ListwiseLoss, MatchesOracleAndIsPermutationInvariant) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    auto pos = uniform(rng, 1 + rng() % 20, -2, 2);
    auto neg = uniform(rng, 1 + rng() % 20, -2, 2);
    const double l = listwise_loss(pos, neg);
    EXPECT_NEAR(l, oracle_loss(pos, neg), 1e-12);
    EXPECT_GE(l, 0.0);
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);
    EXPECT_NEAR(listwise_loss(pos, neg), l, 1e-12);
  }
}

TEST(ListwiseLoss, DuplicateRatingChangesOnlyClassStatistics) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    auto pos = uniform(rng, 1 + rng() % 10, 0, 1);
    const auto neg = uniform(rng, 1 + rng() % 10, 0, 1);
    pos.push_back(pos[rng() % pos.size()]);
    const auto sp = class_stats(pos);
    const auto sn = class_stats(neg);
    const double expect = (1 - sp.mean) * (1 - sp.mean) + sn.mean * sn.mean + sp.variance + sn.variance;
    EXPECT_NEAR(listwise_loss(pos, neg), expect, 1e-13);
  }
}

TEST(ListwiseGrad, Examples) {
  const auto ideal = listwise_grad(Vec{1, 1}, Vec{0, 0});
  for (double g : ideal.positive) EXPECT_EQ(g, 0.0);
  for (double g : ideal.negative) EXPECT_EQ(g, 0.0);
  const auto single = listwise_grad(Vec{0.5}, Vec{0.0});
  EXPECT_DOUBLE_EQ(single.positive[0], -1.0);
  EXPECT_THROW(listwise_grad(Vec{}, Vec{0.0}), ConfigError);
}

TEST(ListwiseGrad, MatchesFiniteDifferences) {
  std::mt19937_64 rng(9);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t np = 1 + rng() % 50;
    const std::size_t nn = 1 + rng() % 50;
    Vec all = uniform(rng, np + nn, -2, 2);
    const auto g = listwise_grad(std::span(all).first(np), std::span(all).subspan(np));
    Vec analytic = g.positive;
    analytic.insert(analytic.end(), g.negative.begin(), g.negative.end());
    const double h = 1e-5;
    for (std::size_t j = 0; j < all.size(); ++j) {
      Vec up = all, down = all;
      up[j] += h;
      down[j] -= h;
      const double numeric = (listwise_loss(std::span(up).first(np), std::span(up).subspan(np)) -
                              listwise_loss(std::span(down).first(np), std::span(down).subspan(np))) /
                             (2 * h);
      worst = std::max(worst, std::abs(numeric - analytic[j]));
    }
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(ListwiseGrad, GradientDescentConverges) {
  std::mt19937_64 rng(10);
  Vec pos = uniform(rng, 6, 0, 1);
  Vec neg = uniform(rng, 9, 0, 1);
  for (int step = 0; step < 10000; ++step) {
    const auto g = listwise_grad(pos, neg);
    for (std::size_t i = 0; i < pos.size(); ++i) pos[i] -= 0.5 * g.positive[i];
    for (std::size_t j = 0; j < neg.size(); ++j) neg[j] -= 0.5 * g.negative[j];
  }
  EXPECT_LT(listwise_loss(pos, neg), 1e-6);
}

TEST(AttentionLoss, ExamplesAndRange) {
  EXPECT_EQ(attention_loss(1.0), 0.0);
  EXPECT_EQ(attention_loss(0.0), 1.0);
  EXPECT_NEAR(attention_loss(0.6), 0.16, 1e-15);
  EXPECT_NEAR(attention_loss_grad(0.6), -0.8, 1e-15);
  EXPECT_THROW(attention_loss(1.5), ConfigError);
  EXPECT_THROW(attention_loss(-0.1), ConfigError);
}

TEST(TotalLoss, IsUnweightedSum) {
  EXPECT_NEAR(total_loss(0.5, 0.16), 0.66, 1e-15);
  EXPECT_EQ(total_loss(0.0, 0.0), 0.0);
  EXPECT_THROW(total_loss(-1.0, 0.0), ConfigError);
}
