#pragma once

// Per-user ranking metrics. Functions returning std::optional signal an
// excluded user (nothing to measure) with std::nullopt.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "xnetrec/data.hpp"

namespace xnetrec {

// Fraction of (positive, negative) score pairs ordered correctly, ties 0.5.
// nullopt when either list is empty.
std::optional<double> auc_user(std::span<const double> pos_scores, std::span<const double> neg_scores);

// |top_n ∩ positives| / min(n, |positives|); nullopt for an empty test set.
// Throws ConfigError if the ranked list is longer than n.
std::optional<double> hit_ratio(std::span<const ItemId> ranked_top_n, const std::set<ItemId>& test_positives,
                                std::size_t n);

// Highest `n` scores outside `exclude`, descending, ties by ascending id.
std::vector<ItemId> top_n(const std::map<ItemId, double>& scores, std::size_t n, const std::set<ItemId>& exclude = {});

struct ItemPopularity {
  std::map<ItemId, std::size_t> counts;
  std::size_t total = 0;

  static ItemPopularity from(std::span<const Interaction> train);
  // Share of training interactions; unseen items get 1 / (total + 1).
  double share(ItemId item) const;
};

// Mean self-information -log2(p_i) over every recommended item of every list.
double novelty(std::span<const std::vector<ItemId>> recommended, const ItemPopularity& popularity);

// Mean over lists of the average pairwise (1 - cosine) between item topic
// vectors; single-item lists contribute 0, empty lists are skipped. Throws
// DataError when an item has no topic vector.
double diversity(std::span<const std::vector<ItemId>> recommended,
                 const std::map<ItemId, std::vector<double>>& item_topics);

}  // namespace xnetrec
