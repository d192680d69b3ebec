#pragma once

// Time-aware cross-network recommender.
//
// Per network, every interval's topical snapshot is embedded as the
// frequency-weighted sum of topic vectors (the short-term vector s^t). The
// long-term vector sums the past short-term vectors, and the long-short-term
// vector weights each past one by an attention score phi([s^t; s^tau]) in
// [0, 1]. New users combine the three source-network components by addition;
// existing users feed a user embedding plus both networks' components through
// an integration network. A rating network scores [p; v_i] for every item.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xnetrec/data.hpp"
#include "xnetrec/matrix.hpp"
#include "xnetrec/nn.hpp"
#include "xnetrec/tensor_store.hpp"

namespace xnetrec {

// ---- building blocks ----------------------------------------------------------

// f_c * v_c for every topic c with non-zero frequency, in topic order. `table`
// holds one row per topic. Throws ShapeError on a length mismatch.
std::vector<std::vector<double>> embed_interval(std::span<const double> snapshot, const Matrix& table);

// Componentwise sum; zero vector of length `k` when empty.
std::vector<double> short_term(std::span<const std::vector<double>> embeddings, std::size_t k);

// Sum of the past short-term vectors (current interval excluded by the caller).
std::vector<double> long_term(std::span<const std::vector<double>> history, std::size_t k);

// phi([current; past]) for every past vector.
std::vector<double> attention_scores(std::span<const double> current, std::span<const std::vector<double>> history,
                                     const DenseNet& head, Mode mode = Mode::eval());

// Sum of alpha * s over the history.
std::vector<double> long_short_term(std::span<const std::vector<double>> history, std::span<const double> scores,
                                    std::size_t k);

std::vector<double> integrate_new(std::span<const double> sp, std::span<const double> lp, std::span<const double> lsp);

// Phi_E([v_e; sp; lp; lsp]); the components are the source and target halves
// concatenated (length 2k each).
std::vector<double> integrate_existing(std::span<const double> user_embedding, std::span<const double> sp,
                                       std::span<const double> lp, std::span<const double> lsp,
                                       const DenseNet& head, Mode mode = Mode::eval());

// Phi_R([p; v_i]).
double predict_rating(std::span<const double> preference, std::span<const double> item_embedding,
                      const DenseNet& head, Mode mode = Mode::eval());

// ---- model --------------------------------------------------------------------

enum class Variant { Full, NoS, NoL, NoLS, NoT };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);
const std::vector<Variant>& all_variants();

struct CrossNetConfig {
  int topics = 64;
  int k = 32;          // topic embedding width
  int item_dim = 32;   // D
  int user_dim = 16;   // D'
  double dropout = 0.3;
  double init_std = 0.1;
  bool normalize_history = false;  // divide long and long-short sums by t - 1
  Variant variant = Variant::Full;
  AdamConfig adam;
  int batch_size = 8;  // instances per Adam step
  std::uint64_t seed = 1;

  void validate() const;
};

struct CrossNetInstance {
  std::size_t user = 0;  // index into the UserRecord span given to the model
  int history = 0;       // intervals 1..history are visible; history + 1 is predicted
  std::vector<ItemId> positives;
  std::vector<ItemId> negatives;
};

struct InstanceLoss {
  double listwise = 0.0;
  double attention = 0.0;
};

struct EpochLosses {
  int epoch = 0;
  double lw_new = 0.0;
  double at_new = 0.0;
  double lw_existing = 0.0;
  double at_existing = 0.0;
  std::size_t new_instances = 0;
  std::size_t existing_instances = 0;
};

struct CrossNetGrads {
  Matrix source_topics;
  Matrix target_topics;
  DenseNetGrads attention_source;
  DenseNetGrads attention_target;
  DenseNetGrads integrate;
  DenseNetGrads rating;
  Matrix user_embeddings;
  Matrix item_embeddings;

  void zero();
};

class CrossNetModel {
 public:
  CrossNetModel() = default;
  // `existing_users` and `items` must be sorted and unique.
  CrossNetModel(CrossNetConfig config, std::vector<UserId> existing_users, std::vector<ItemId> items);

  const CrossNetConfig& config() const { return config_; }
  void set_variant(Variant v) { config_.variant = v; }
  // Replaces the optimizer settings (fresh Adam state); used after load().
  void configure_training(AdamConfig adam, int batch_size, std::uint64_t seed);
  const std::vector<UserId>& existing_users() const { return existing_users_; }
  const std::vector<ItemId>& items() const { return items_; }

  // Preference vector p (length k) of `user` using intervals 1..history.
  std::vector<double> preference(const UserRecord& user, int history, Mode mode = Mode::eval()) const;

  // Eval-mode ratings for `items` given intervals 1..history.
  std::vector<double> score(const UserRecord& user, int history, std::span<const ItemId> items) const;

  // phi(s, s) for the short-term vector of `interval`, per applicable network
  // (source, then target for existing users). Zero short-term vectors are
  // skipped.
  std::vector<double> self_attention(const UserRecord& user, int interval) const;

  // Listwise plus attention loss of one instance; accumulates gradients into
  // `grads` when given. Throws DataError for unknown items.
  InstanceLoss loss(const UserRecord& user, const CrossNetInstance& instance, Mode mode,
                    CrossNetGrads* grads = nullptr) const;

  CrossNetGrads make_grads() const;
  std::vector<ParamSlot> slots(CrossNetGrads& grads);
  std::size_t parameter_count() const;

  // One pass over `instances` in a seeded shuffled order, new and existing
  // users interleaved. Losses are means per instance of each user kind.
  EpochLosses train_epoch(std::span<const UserRecord> users, std::span<const CrossNetInstance> instances);
  int epochs_trained() const { return epochs_trained_; }

  void save(TensorStore& store) const;
  static CrossNetModel load(const TensorStore& store);

 private:
  struct NetworkPass;
  struct Pass;

  std::size_t item_row(ItemId item) const;
  std::size_t user_row(UserId user) const;
  const Matrix& table(Network n) const { return n == Network::Source ? source_topics_ : target_topics_; }
  const DenseNet& attention(Network n) const { return n == Network::Source ? attention_source_ : attention_target_; }
  NetworkPass run_network(const std::vector<std::vector<double>>& stream, Network net, int history, Mode mode,
                          std::uint64_t tag, bool keep) const;
  Pass forward(const UserRecord& user, int history, Mode mode, bool keep) const;
  void backward_network(const NetworkPass& pass, std::span<const double> d_sp, std::span<const double> d_lp,
                        std::span<const double> d_lsp, double d_self, CrossNetGrads& grads) const;

  CrossNetConfig config_;
  std::vector<UserId> existing_users_;
  std::vector<ItemId> items_;
  Matrix source_topics_;
  Matrix target_topics_;
  DenseNet attention_source_;
  DenseNet attention_target_;
  DenseNet integrate_;
  DenseNet rating_;
  Matrix user_embeddings_;
  Matrix item_embeddings_;
  Adam adam_;
  int epochs_trained_ = 0;
  std::uint64_t steps_ = 0;
};

}  // namespace xnetrec
