#include "xnetrec/popularity.hpp"

#include <string>

#include "xnetrec/errors.hpp"

namespace xnetrec {

std::map<ItemId, double> pop_scores(std::span<const Interaction> train) {
  std::map<ItemId, double> scores;
  for (const auto& rec : train) scores[rec.item] += 1.0;
  return scores;
}

std::map<ItemId, double> timepop_scores(std::span<const Interaction> train, const IntervalGrid& grid, int t) {
  if (t < 1 || t > grid.count) throw ConfigError("interval " + std::to_string(t) + " not in grid");
  std::map<ItemId, double> scores;
  for (const auto& rec : train) {
    scores.try_emplace(rec.item, 0.0);
    if (grid.index_of(rec.timestamp) == t) scores[rec.item] += 1.0;
  }
  return scores;
}

}  // namespace xnetrec
