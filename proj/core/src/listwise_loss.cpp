#include "xnetrec/listwise_loss.hpp"

#include <cmath>
#include <string>

#include "xnetrec/errors.hpp"

namespace xnetrec {

ClassStats class_stats(std::span<const double> ratings) {
  if (ratings.empty()) throw ConfigError("empty class");
  const auto n = static_cast<double>(ratings.size());
  double sum = 0.0;
  for (double r : ratings) sum += r;
  const double mean = sum / n;
  double sq = 0.0;
  for (double r : ratings) sq += (r - mean) * (r - mean);
  return {mean, sq / n, ratings.size()};
}

double listwise_loss(std::span<const double> positive_ratings, std::span<const double> negative_ratings) {
  const auto pos = class_stats(positive_ratings);
  const auto neg = class_stats(negative_ratings);
  return (1.0 - pos.mean) * (1.0 - pos.mean) + neg.mean * neg.mean + pos.variance + neg.variance;
}

ListwiseGrad listwise_grad(std::span<const double> positive_ratings, std::span<const double> negative_ratings) {
  const auto pos = class_stats(positive_ratings);
  const auto neg = class_stats(negative_ratings);
  const double np = static_cast<double>(pos.count);
  const double nn = static_cast<double>(neg.count);
  ListwiseGrad g;
  g.positive.reserve(positive_ratings.size());
  g.negative.reserve(negative_ratings.size());
  // The variance terms' mean-derivative sums to zero over the class, leaving
  // only the direct 2(r - mu)/n contribution.
  for (double r : positive_ratings) g.positive.push_back(2.0 * (pos.mean - 1.0) / np + 2.0 * (r - pos.mean) / np);
  for (double r : negative_ratings) g.negative.push_back(2.0 * neg.mean / nn + 2.0 * (r - neg.mean) / nn);
  return g;
}

double attention_loss(double score) {
  if (!(score >= 0.0 && score <= 1.0)) throw ConfigError("attention score outside [0,1]: " + std::to_string(score));
  return (1.0 - score) * (1.0 - score);
}

double attention_loss_grad(double score) {
  if (!(score >= 0.0 && score <= 1.0)) throw ConfigError("attention score outside [0,1]: " + std::to_string(score));
  return -2.0 * (1.0 - score);
}

double total_loss(double listwise, double attention) {
  if (!(listwise >= 0.0) || !(attention >= 0.0)) throw ConfigError("loss components must be non-negative");
  return listwise + attention;
}

}  // namespace xnetrec
