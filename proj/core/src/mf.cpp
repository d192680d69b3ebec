#include "xnetrec/mf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "xnetrec/errors.hpp"
#include "xnetrec/listwise_loss.hpp"
#include "xnetrec/nn.hpp"
#include "xnetrec/random.hpp"

namespace xnetrec {

namespace {

enum Stream : std::uint64_t { kInit = 1, kOrder, kNegatives, kTriplets };

template <typename Id>
std::optional<std::size_t> find_index(const std::vector<Id>& sorted, Id id) {
  const auto it = std::ranges::lower_bound(sorted, id);
  if (it == sorted.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - sorted.begin());
}

template <typename Id>
void require_sorted_unique(const std::vector<Id>& ids, const char* what) {
  for (std::size_t i = 1; i < ids.size(); ++i) {
    if (!(ids[i - 1] < ids[i])) throw ConfigError(std::string(what) + " ids must be sorted and unique");
  }
}

void check_finite(double loss, int epoch) {
  if (!std::isfinite(loss)) throw NumericError("non-finite loss at epoch " + std::to_string(epoch));
}

// Gradient buffers shaped like the factor matrices, plus the Adam state.
struct FactorOptimizer {
  Matrix grad_users;
  Matrix grad_items;
  Adam adam;

  FactorOptimizer(const MFParams& p, double lr)
      : grad_users(p.user_factors.rows, p.user_factors.cols),
        grad_items(p.item_factors.rows, p.item_factors.cols),
        adam(AdamConfig{lr}) {}

  void zero() {
    grad_users.fill(0.0);
    grad_items.fill(0.0);
  }

  void step(MFParams& p, double scale) {
    if (scale != 1.0) {
      for (double& g : grad_users.values) g *= scale;
      for (double& g : grad_items.values) g *= scale;
    }
    adam.step({{"users", p.user_factors.values, grad_users.values}, {"items", p.item_factors.values, grad_items.values}});
  }
};

std::uint32_t sample_negative(const ImplicitDataset& data, std::size_t user, Rng& rng) {
  const auto& active = data.active_items();
  std::uniform_int_distribution<std::size_t> pick(0, active.size() - 1);
  for (;;) {
    const std::uint32_t j = active[pick(rng)];
    if (data.is_negative(user, j)) return j;
  }
}

bool has_negative(const ImplicitDataset& data, std::size_t user) {
  return !data.negatives(user).empty();
}

}  // namespace

// ---- MFParams --------------------------------------------------------------------

MFParams MFParams::init(std::vector<UserId> users, std::vector<ItemId> items, int dim, std::uint64_t seed) {
  if (dim < 1) throw ConfigError("latent dimension must be >= 1");
  require_sorted_unique(users, "user");
  require_sorted_unique(items, "item");
  MFParams p;
  p.dim = dim;
  p.users = std::move(users);
  p.items = std::move(items);
  p.user_factors = Matrix(p.users.size(), static_cast<std::size_t>(dim));
  p.item_factors = Matrix(p.items.size(), static_cast<std::size_t>(dim));
  auto rng = make_rng(seed, {kInit});
  std::normal_distribution<double> normal(0.0, 0.1);
  for (double& x : p.user_factors.values) x = normal(rng);
  for (double& x : p.item_factors.values) x = normal(rng);
  return p;
}

std::optional<std::size_t> MFParams::user_index(UserId u) const { return find_index(users, u); }
std::optional<std::size_t> MFParams::item_index(ItemId i) const { return find_index(items, i); }

double MFParams::predict(UserId u, ItemId i) const {
  const auto ui = user_index(u);
  if (!ui) throw DataError("unknown user " + std::to_string(u));
  const auto ii = item_index(i);
  if (!ii) throw DataError("unknown item " + std::to_string(i));
  return predict_index(*ui, *ii);
}

void MFParams::save(TensorStore& store) const {
  store.set_meta("mf.dim", std::to_string(dim));
  store.add("mf.user_ids", ids_to_matrix(users));
  store.add("mf.item_ids", ids_to_matrix(items));
  store.add("mf.user_factors", user_factors);
  store.add("mf.item_factors", item_factors);
}

MFParams MFParams::load(const TensorStore& store) {
  MFParams p;
  p.dim = std::stoi(store.meta("mf.dim"));
  p.users = matrix_to_ids(store.get("mf.user_ids"));
  p.items = matrix_to_ids(store.get("mf.item_ids"));
  p.user_factors = store.get("mf.user_factors", p.users.size(), static_cast<std::size_t>(p.dim));
  p.item_factors = store.get("mf.item_factors", p.items.size(), static_cast<std::size_t>(p.dim));
  return p;
}

// ---- ImplicitDataset ------------------------------------------------------------------

ImplicitDataset ImplicitDataset::build(std::span<const Interaction> train, std::vector<UserId> users,
                                       std::vector<ItemId> items,
                                       std::span<const std::pair<UserId, ItemId>> held_out) {
  require_sorted_unique(users, "user");
  require_sorted_unique(items, "item");
  ImplicitDataset d;
  d.users_ = std::move(users);
  d.items_ = std::move(items);
  d.positives_.resize(d.users_.size());
  d.blocked_.resize(d.users_.size());
  d.active_.assign(d.items_.size(), false);

  for (const auto& rec : train) {
    const auto u = find_index(d.users_, rec.user);
    const auto i = find_index(d.items_, rec.item);
    if (!u || !i) throw DataError("training interaction outside the user/item universe");
    d.positives_[*u].push_back(static_cast<std::uint32_t>(*i));
    d.active_[*i] = true;
  }
  for (const auto& [user, item] : held_out) {
    const auto u = find_index(d.users_, user);
    const auto i = find_index(d.items_, item);
    if (u && i) d.blocked_[*u].push_back(static_cast<std::uint32_t>(*i));
  }
  for (std::size_t u = 0; u < d.users_.size(); ++u) {
    auto& pos = d.positives_[u];
    std::ranges::sort(pos);
    pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
    d.positive_count_ += pos.size();
    auto& blk = d.blocked_[u];
    blk.insert(blk.end(), pos.begin(), pos.end());
    std::ranges::sort(blk);
    blk.erase(std::unique(blk.begin(), blk.end()), blk.end());
  }
  for (std::uint32_t i = 0; i < d.items_.size(); ++i) {
    if (d.active_[i]) d.active_items_.push_back(i);
  }
  return d;
}

bool ImplicitDataset::is_negative(std::size_t user, std::uint32_t item) const {
  return active_[item] && !std::ranges::binary_search(blocked_[user], item);
}

std::vector<std::uint32_t> ImplicitDataset::negatives(std::size_t user) const {
  std::vector<std::uint32_t> out;
  const auto& blk = blocked_[user];
  out.reserve(active_items_.size());
  std::size_t b = 0;
  for (std::uint32_t i : active_items_) {
    while (b < blk.size() && blk[b] < i) ++b;
    if (b < blk.size() && blk[b] == i) continue;
    out.push_back(i);
  }
  return out;
}

// ---- listwise ------------------------------------------------------------------------------

namespace {

// Adds one user's listwise gradient to the buffers; returns the user's loss.
double accumulate_listwise(const MFParams& p, std::size_t u, std::span<const std::uint32_t> pos,
                           std::span<const std::uint32_t> neg, double lambda, FactorOptimizer& opt) {
  std::vector<double> rp(pos.size());
  std::vector<double> rn(neg.size());
  for (std::size_t k = 0; k < pos.size(); ++k) rp[k] = p.predict_index(u, pos[k]);
  for (std::size_t k = 0; k < neg.size(); ++k) rn[k] = p.predict_index(u, neg[k]);
  const double loss = listwise_loss(rp, rn);
  const auto g = listwise_grad(rp, rn);

  auto gu = opt.grad_users.row(u);
  const auto wu = p.user_factors.row(u);
  for (std::size_t k = 0; k < pos.size(); ++k) {
    axpy(g.positive[k], p.item_factors.row(pos[k]), gu);
    axpy(g.positive[k], wu, opt.grad_items.row(pos[k]));
  }
  for (std::size_t k = 0; k < neg.size(); ++k) {
    axpy(g.negative[k], p.item_factors.row(neg[k]), gu);
    axpy(g.negative[k], wu, opt.grad_items.row(neg[k]));
  }
  if (lambda != 0.0) {
    axpy(lambda, wu, gu);
    for (auto i : pos) axpy(lambda, p.item_factors.row(i), opt.grad_items.row(i));
    for (auto i : neg) axpy(lambda, p.item_factors.row(i), opt.grad_items.row(i));
  }
  return loss;
}

}  // namespace

EpochStats listwise_stats(const ImplicitDataset& data, const MFParams& params) {
  EpochStats s;
  std::size_t n = 0;
  for (std::size_t u = 0; u < data.users().size(); ++u) {
    const auto& pos = data.positives(u);
    if (pos.empty()) continue;
    const auto neg = data.negatives(u);
    if (neg.empty()) continue;
    std::vector<double> rp;
    std::vector<double> rn;
    for (auto i : pos) rp.push_back(params.predict_index(u, i));
    for (auto i : neg) rn.push_back(params.predict_index(u, i));
    const auto cp = class_stats(rp);
    const auto cn = class_stats(rn);
    s.mean_pos += cp.mean;
    s.mean_neg += cn.mean;
    s.var_pos += cp.variance;
    s.var_neg += cn.variance;
    s.loss += listwise_loss(rp, rn);
    ++n;
  }
  if (n > 0) {
    const double d = static_cast<double>(n);
    s.mean_pos /= d;
    s.mean_neg /= d;
    s.var_pos /= d;
    s.var_neg /= d;
    s.loss /= d;
  }
  return s;
}

ListwiseMFResult train_listwise(const ImplicitDataset& data, const ListwiseMFConfig& config,
                                const EpochCallback& on_epoch) {
  if (config.batch_users < 1) throw ConfigError("batch_users must be >= 1");
  if (data.positive_count() == 0) throw DataError("empty training set");
  ListwiseMFResult result;
  result.params = MFParams::init(data.users(), data.items(), config.dim, config.seed);
  auto& p = result.params;
  FactorOptimizer opt(p, config.learning_rate);

  std::vector<std::size_t> trainable;
  for (std::size_t u = 0; u < data.users().size(); ++u) {
    if (!data.positives(u).empty() && has_negative(data, u)) trainable.push_back(u);
  }

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    auto order = trainable;
    auto order_rng = make_rng(config.seed, {kOrder, static_cast<std::uint64_t>(epoch)});
    std::shuffle(order.begin(), order.end(), order_rng);

    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_users)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(config.batch_users));
      opt.zero();
      double batch_loss = 0.0;
      for (std::size_t b = start; b < stop; ++b) {
        const std::size_t u = order[b];
        const auto& pos = data.positives(u);
        auto neg = data.negatives(u);
        const std::size_t n = config.negatives.sample_size(pos.size(), neg.size());
        if (n < neg.size()) {
          std::vector<std::uint32_t> picked;
          picked.reserve(n);
          auto rng = make_rng(config.seed, {kNegatives, static_cast<std::uint64_t>(epoch), u});
          std::ranges::sample(neg, std::back_inserter(picked), static_cast<std::ptrdiff_t>(n), rng);
          neg = std::move(picked);
        }
        if (neg.empty()) continue;
        batch_loss += accumulate_listwise(p, u, pos, neg, config.weight_decay, opt);
      }
      check_finite(batch_loss, epoch);
      opt.step(p, 1.0 / static_cast<double>(stop - start));
    }

    auto stats = listwise_stats(data, p);
    stats.epoch = epoch;
    check_finite(stats.loss, epoch);
    result.trace.push_back(stats);
    if (on_epoch) on_epoch(epoch, p);
  }
  return result;
}

// ---- pointwise --------------------------------------------------------------------------------

MFParams train_pointwise(const ImplicitDataset& data, const PointwiseMFConfig& config, const EpochCallback& on_epoch) {
  if (config.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (config.neg_ratio < 0) throw ConfigError("neg_ratio must be >= 0");
  if (data.positive_count() == 0) throw DataError("empty training set");
  auto p = MFParams::init(data.users(), data.items(), config.dim, config.seed);
  FactorOptimizer opt(p, config.learning_rate);

  struct Sample {
    std::uint32_t user;
    std::uint32_t item;
    double target;
  };

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::vector<Sample> samples;
    samples.reserve(data.positive_count() * static_cast<std::size_t>(1 + config.neg_ratio));
    auto neg_rng = make_rng(config.seed, {kNegatives, static_cast<std::uint64_t>(epoch)});
    for (std::size_t u = 0; u < data.users().size(); ++u) {
      const bool can_sample = has_negative(data, u);
      for (auto i : data.positives(u)) {
        samples.push_back({static_cast<std::uint32_t>(u), i, 1.0});
        if (!can_sample) continue;
        for (int r = 0; r < config.neg_ratio; ++r) {
          samples.push_back({static_cast<std::uint32_t>(u), sample_negative(data, u, neg_rng), 0.0});
        }
      }
    }
    auto order_rng = make_rng(config.seed, {kOrder, static_cast<std::uint64_t>(epoch)});
    std::shuffle(samples.begin(), samples.end(), order_rng);

    for (std::size_t start = 0; start < samples.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop = std::min(samples.size(), start + static_cast<std::size_t>(config.batch_size));
      opt.zero();
      double loss = 0.0;
      for (std::size_t s = start; s < stop; ++s) {
        const auto& smp = samples[s];
        const double err = p.predict_index(smp.user, smp.item) - smp.target;
        loss += err * err;
        const double g = 2.0 * err;
        axpy(g, p.item_factors.row(smp.item), opt.grad_users.row(smp.user));
        axpy(g, p.user_factors.row(smp.user), opt.grad_items.row(smp.item));
      }
      check_finite(loss, epoch);
      opt.step(p, 1.0 / static_cast<double>(stop - start));
    }
    if (on_epoch) on_epoch(epoch, p);
  }
  return p;
}

// ---- BPR ------------------------------------------------------------------------------------------

MFParams train_bpr(const ImplicitDataset& data, const BprMFConfig& config, const EpochCallback& on_epoch) {
  if (config.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (data.positive_count() == 0) throw DataError("empty training set");
  auto p = MFParams::init(data.users(), data.items(), config.dim, config.seed);
  FactorOptimizer opt(p, config.learning_rate);

  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::size_t u = 0; u < data.users().size(); ++u) {
    if (!has_negative(data, u)) continue;
    for (auto i : data.positives(u)) pairs.emplace_back(static_cast<std::uint32_t>(u), i);
  }
  if (pairs.empty()) return p;
  const std::size_t per_epoch = config.samples_per_epoch ? config.samples_per_epoch : data.positive_count();
  const double lambda = config.weight_decay;
  std::vector<double> diff(static_cast<std::size_t>(config.dim));

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    auto rng = make_rng(config.seed, {kTriplets, static_cast<std::uint64_t>(epoch)});
    std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
    for (std::size_t start = 0; start < per_epoch; start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop = std::min(per_epoch, start + static_cast<std::size_t>(config.batch_size));
      opt.zero();
      double loss = 0.0;
      for (std::size_t s = start; s < stop; ++s) {
        const auto [u, i] = pairs[pick(rng)];
        const std::uint32_t j = sample_negative(data, u, rng);
        const double x = p.predict_index(u, i) - p.predict_index(u, j);
        loss += std::log1p(std::exp(-x));
        const double g = -sigmoid(-x);  // d/dx of -ln sigmoid(x)
        const auto wu = p.user_factors.row(u);
        const auto hi = p.item_factors.row(i);
        const auto hj = p.item_factors.row(j);
        for (std::size_t f = 0; f < diff.size(); ++f) diff[f] = hi[f] - hj[f];
        auto gu = opt.grad_users.row(u);
        axpy(g, diff, gu);
        axpy(lambda, wu, gu);
        auto gi = opt.grad_items.row(i);
        axpy(g, wu, gi);
        axpy(lambda, hi, gi);
        auto gj = opt.grad_items.row(j);
        axpy(-g, wu, gj);
        axpy(lambda, hj, gj);
      }
      check_finite(loss, epoch);
      opt.step(p, 1.0 / static_cast<double>(stop - start));
    }
    if (on_epoch) on_epoch(epoch, p);
  }
  return p;
}

}  // namespace xnetrec
