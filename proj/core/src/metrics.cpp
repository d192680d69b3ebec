#include "xnetrec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xnetrec/errors.hpp"
#include "xnetrec/matrix.hpp"

namespace xnetrec {

std::optional<double> auc_user(std::span<const double> pos_scores, std::span<const double> neg_scores) {
  if (pos_scores.empty() || neg_scores.empty()) return std::nullopt;
  // Sort negatives once; each positive counts strictly-lower and equal negatives.
  std::vector<double> neg(neg_scores.begin(), neg_scores.end());
  std::ranges::sort(neg);
  double correct = 0.0;
  for (double p : pos_scores) {
    const auto lo = std::ranges::lower_bound(neg, p);
    const auto hi = std::upper_bound(lo, neg.end(), p);
    correct += static_cast<double>(lo - neg.begin()) + 0.5 * static_cast<double>(hi - lo);
  }
  return correct / (static_cast<double>(pos_scores.size()) * static_cast<double>(neg.size()));
}

std::optional<double> hit_ratio(std::span<const ItemId> ranked_top_n, const std::set<ItemId>& test_positives,
                                std::size_t n) {
  if (ranked_top_n.size() > n) throw ConfigError("ranked list longer than n");
  if (test_positives.empty()) return std::nullopt;
  std::size_t hits = 0;
  for (ItemId i : ranked_top_n) hits += test_positives.contains(i) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(std::min(n, test_positives.size()));
}

std::vector<ItemId> top_n(const std::map<ItemId, double>& scores, std::size_t n, const std::set<ItemId>& exclude) {
  if (n < 1) throw ConfigError("top_n needs n >= 1");
  std::vector<std::pair<double, ItemId>> pool;
  pool.reserve(scores.size());
  for (const auto& [item, s] : scores) {
    if (!exclude.contains(item)) pool.emplace_back(s, item);
  }
  const auto better = [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); };
  const std::size_t k = std::min(n, pool.size());
  std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k), pool.end(), better);
  std::vector<ItemId> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(pool[i].second);
  return out;
}

ItemPopularity ItemPopularity::from(std::span<const Interaction> train) {
  ItemPopularity p;
  for (const auto& r : train) ++p.counts[r.item];
  p.total = train.size();
  return p;
}

double ItemPopularity::share(ItemId item) const {
  const auto it = counts.find(item);
  if (it == counts.end() || total == 0) return 1.0 / static_cast<double>(total + 1);
  return static_cast<double>(it->second) / static_cast<double>(total);
}

double novelty(std::span<const std::vector<ItemId>> recommended, const ItemPopularity& popularity) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& list : recommended) {
    for (ItemId i : list) {
      sum += -std::log2(popularity.share(i));
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double diversity(std::span<const std::vector<ItemId>> recommended,
                 const std::map<ItemId, std::vector<double>>& item_topics) {
  const auto topics_of = [&](ItemId i) -> const std::vector<double>& {
    const auto it = item_topics.find(i);
    if (it == item_topics.end()) throw DataError("no topic vector for item " + std::to_string(i));
    return it->second;
  };
  double sum = 0.0;
  std::size_t lists = 0;
  for (const auto& list : recommended) {
    if (list.empty()) continue;
    ++lists;
    if (list.size() == 1) {
      topics_of(list.front());
      continue;
    }
    double pair_sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < list.size(); ++a) {
      const auto& va = topics_of(list[a]);
      for (std::size_t b = a + 1; b < list.size(); ++b) {
        const auto& vb = topics_of(list[b]);
        const double denom = std::sqrt(dot(va, va) * dot(vb, vb));
        const double cosine = denom > 0.0 ? dot(va, vb) / denom : 0.0;
        pair_sum += 1.0 - cosine;
        ++pairs;
      }
    }
    sum += pair_sum / static_cast<double>(pairs);
  }
  return lists == 0 ? 0.0 : sum / static_cast<double>(lists);
}

}  // namespace xnetrec
