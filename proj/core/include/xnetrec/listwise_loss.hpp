#pragma once

// Mean/variance classification criterion for implicit feedback.
//
// For one user, predicted ratings are split into the interacted class I and the
// non-interacted class NI. The loss
//
//   (1 - mu_I)^2 + mu_NI^2 + var_I + var_NI
//
// pulls the interacted mean to 1, the non-interacted mean to 0, and both class
// variances (population, divisor n) to 0. It is zero exactly when every
// interacted rating is 1 and every non-interacted rating is 0.

#include <cstddef>
#include <span>
#include <vector>

namespace xnetrec {

struct ClassStats {
  double mean = 0.0;
  double variance = 0.0;  // population variance
  std::size_t count = 0;
};

// Throws ConfigError("empty class") on an empty list.
ClassStats class_stats(std::span<const double> ratings);

// Per-user listwise loss. Both lists must be non-empty.
double listwise_loss(std::span<const double> positive_ratings, std::span<const double> negative_ratings);

struct ListwiseGrad {
  std::vector<double> positive;
  std::vector<double> negative;
};

// d loss / d rating for every entry of both lists:
//   positives: 2(mu_I - 1)/n+ + 2(r - mu_I)/n+
//   negatives: 2 mu_NI / n-   + 2(r - mu_NI)/n-
ListwiseGrad listwise_grad(std::span<const double> positive_ratings, std::span<const double> negative_ratings);

// (1 - score)^2 for an attention score on a duplicated input pair. The score
// is a sigmoid output, so anything outside [0, 1] is rejected.
double attention_loss(double score);
double attention_loss_grad(double score);

// Unweighted sum of the two components; both must be non-negative.
double total_loss(double listwise, double attention);

}  // namespace xnetrec
