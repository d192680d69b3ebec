#pragma once

// Non-personalized baselines. Every user receives the same ranking; ties are
// broken by ascending item id when ranked with top_n().

#include <map>
#include <span>

#include "xnetrec/data.hpp"

namespace xnetrec {

// Interaction count per item.
std::map<ItemId, double> pop_scores(std::span<const Interaction> train);

// Interaction count per item restricted to interval `t` of `grid`.
// Throws ConfigError when t is not an interval of the grid.
std::map<ItemId, double> timepop_scores(std::span<const Interaction> train, const IntervalGrid& grid, int t);

}  // namespace xnetrec
