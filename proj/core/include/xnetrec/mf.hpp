#pragma once

// Matrix factorization r(u, i) = <w_u, h_i> trained under three criteria:
// pointwise squared error, pairwise BPR, and the listwise mean/variance loss.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "xnetrec/data.hpp"
#include "xnetrec/matrix.hpp"
#include "xnetrec/tensor_store.hpp"

namespace xnetrec {

struct MFParams {
  int dim = 0;
  std::vector<UserId> users;  // sorted; row order of user_factors
  std::vector<ItemId> items;  // sorted; row order of item_factors
  Matrix user_factors;
  Matrix item_factors;

  // Factors drawn from N(0, 0.1^2).
  static MFParams init(std::vector<UserId> users, std::vector<ItemId> items, int dim, std::uint64_t seed);

  std::optional<std::size_t> user_index(UserId u) const;
  std::optional<std::size_t> item_index(ItemId i) const;

  // Throws DataError for an unknown user or item.
  double predict(UserId u, ItemId i) const;
  double predict_index(std::size_t u, std::size_t i) const { return dot(user_factors.row(u), item_factors.row(i)); }

  void save(TensorStore& store) const;
  static MFParams load(const TensorStore& store);
};

// Training view of an implicit dataset over a fixed user/item universe.
// Held-out pairs are neither positives nor eligible negatives. Negatives are
// drawn only from items with at least one training positive, so entities
// without training signal are never touched.
class ImplicitDataset {
 public:
  static ImplicitDataset build(std::span<const Interaction> train, std::vector<UserId> users,
                               std::vector<ItemId> items,
                               std::span<const std::pair<UserId, ItemId>> held_out = {});

  const std::vector<UserId>& users() const { return users_; }
  const std::vector<ItemId>& items() const { return items_; }
  // Sorted item indices.
  const std::vector<std::uint32_t>& positives(std::size_t user) const { return positives_[user]; }
  std::size_t positive_count() const { return positive_count_; }
  // Every eligible negative item index for `user`, ascending.
  std::vector<std::uint32_t> negatives(std::size_t user) const;
  // True when `item` is an eligible negative for `user`.
  bool is_negative(std::size_t user, std::uint32_t item) const;
  const std::vector<std::uint32_t>& active_items() const { return active_items_; }

 private:
  std::vector<UserId> users_;
  std::vector<ItemId> items_;
  std::vector<std::vector<std::uint32_t>> positives_;
  std::vector<std::vector<std::uint32_t>> blocked_;  // positives + held out
  std::vector<std::uint32_t> active_items_;
  std::vector<bool> active_;
  std::size_t positive_count_ = 0;
};

struct EpochStats {
  int epoch = 0;
  double mean_pos = 0.0;
  double mean_neg = 0.0;
  double var_pos = 0.0;
  double var_neg = 0.0;
  double loss = 0.0;
};

using EpochCallback = std::function<void(int epoch, const MFParams&)>;

struct ListwiseMFConfig {
  int dim = 32;
  int epochs = 60;
  double learning_rate = 0.005;
  NegativePolicy negatives = NegativePolicy::full();
  int batch_users = 64;
  double weight_decay = 3e-4;  // L2 on the user and every scored item
  std::uint64_t seed = 1;
};

struct ListwiseMFResult {
  MFParams params;
  std::vector<EpochStats> trace;  // one entry per epoch, over full negative lists
};

struct PointwiseMFConfig {
  int dim = 32;
  int epochs = 60;
  double learning_rate = 0.003;
  int neg_ratio = 4;
  int batch_size = 1024;
  std::uint64_t seed = 1;
};

struct BprMFConfig {
  int dim = 32;
  int epochs = 60;
  double learning_rate = 0.003;
  std::size_t samples_per_epoch = 0;  // 0: one triplet per training positive
  double weight_decay = 0.01;
  int batch_size = 2048;
  std::uint64_t seed = 1;
};

// Adam on the per-user listwise loss, users batched and averaged.
ListwiseMFResult train_listwise(const ImplicitDataset& data, const ListwiseMFConfig& config,
                                const EpochCallback& on_epoch = {});

// Squared error to 1 on positives and 0 on `neg_ratio` sampled negatives per positive.
MFParams train_pointwise(const ImplicitDataset& data, const PointwiseMFConfig& config,
                         const EpochCallback& on_epoch = {});

// -ln sigmoid(r_ui - r_uj) plus L2 weight decay on the touched factors.
MFParams train_bpr(const ImplicitDataset& data, const BprMFConfig& config, const EpochCallback& on_epoch = {});

// Listwise trace statistics of `params` over every user's full lists.
EpochStats listwise_stats(const ImplicitDataset& data, const MFParams& params);

}  // namespace xnetrec
