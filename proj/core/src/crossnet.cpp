#include "xnetrec/crossnet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "xnetrec/errors.hpp"
#include "xnetrec/listwise_loss.hpp"
#include "xnetrec/random.hpp"

namespace xnetrec {

namespace {

std::string len_text(std::size_t got, std::size_t want) {
  return "got " + std::to_string(got) + ", expected " + std::to_string(want);
}

void require_len(std::span<const double> v, std::size_t n, const char* what) {
  if (v.size() != n) throw ShapeError(std::string(what) + ": length " + len_text(v.size(), n));
}

void add_into(std::span<double> acc, std::span<const double> x, double scale = 1.0) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += scale * x[i];
}

std::vector<double> concat(std::initializer_list<std::span<const double>> parts) {
  std::vector<double> out;
  for (auto p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

Mode sub_mode(Mode mode, std::initializer_list<std::uint64_t> parts) {
  return mode.train ? Mode::training(derive_seed(mode.seed, parts)) : Mode::eval();
}

template <class Ids>
void require_sorted_unique(const Ids& ids, const char* what) {
  for (std::size_t i = 1; i < ids.size(); ++i) {
    if (!(ids[i - 1] < ids[i])) throw ConfigError(std::string(what) + " must be sorted and unique");
  }
}

Matrix gaussian(std::size_t rows, std::size_t cols, double std_dev, std::uint64_t seed) {
  Matrix m(rows, cols);
  Rng rng(seed);
  std::normal_distribution<double> dist(0.0, std_dev);
  for (double& x : m.values) x = dist(rng);
  return m;
}

constexpr std::uint64_t kTagSource = 0x5352;
constexpr std::uint64_t kTagTarget = 0x5447;
constexpr std::uint64_t kTagSelf = 0x73656c66;
constexpr std::uint64_t kTagIntegrate = 0x494e54;
constexpr std::uint64_t kTagRating = 0x524154;

}  // namespace

// ---- building blocks ----------------------------------------------------------

std::vector<std::vector<double>> embed_interval(std::span<const double> snapshot, const Matrix& table) {
  if (snapshot.size() != table.rows) throw ShapeError("snapshot: length " + len_text(snapshot.size(), table.rows));
  std::vector<std::vector<double>> out;
  for (std::size_t c = 0; c < snapshot.size(); ++c) {
    if (snapshot[c] == 0.0) continue;
    std::vector<double> e(table.cols, 0.0);
    axpy(snapshot[c], table.row(c), e);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<double> short_term(std::span<const std::vector<double>> embeddings, std::size_t k) {
  std::vector<double> s(k, 0.0);
  for (const auto& e : embeddings) {
    require_len(e, k, "topic embedding");
    add_into(s, e);
  }
  return s;
}

std::vector<double> long_term(std::span<const std::vector<double>> history, std::size_t k) {
  return short_term(history, k);
}

std::vector<double> attention_scores(std::span<const double> current, std::span<const std::vector<double>> history,
                                     const DenseNet& head, Mode mode) {
  std::vector<double> out;
  out.reserve(history.size());
  for (std::size_t tau = 0; tau < history.size(); ++tau) {
    require_len(history[tau], current.size(), "past short-term vector");
    out.push_back(head.forward(concat({current, history[tau]}), sub_mode(mode, {tau}))[0]);
  }
  return out;
}

std::vector<double> long_short_term(std::span<const std::vector<double>> history, std::span<const double> scores,
                                    std::size_t k) {
  if (history.size() != scores.size()) {
    throw ShapeError("attention scores: count " + len_text(scores.size(), history.size()));
  }
  std::vector<double> out(k, 0.0);
  for (std::size_t tau = 0; tau < history.size(); ++tau) {
    require_len(history[tau], k, "past short-term vector");
    add_into(out, history[tau], scores[tau]);
  }
  return out;
}

std::vector<double> integrate_new(std::span<const double> sp, std::span<const double> lp, std::span<const double> lsp) {
  require_len(lp, sp.size(), "long-term vector");
  require_len(lsp, sp.size(), "long-short-term vector");
  std::vector<double> p(sp.begin(), sp.end());
  add_into(p, lp);
  add_into(p, lsp);
  return p;
}

std::vector<double> integrate_existing(std::span<const double> user_embedding, std::span<const double> sp,
                                       std::span<const double> lp, std::span<const double> lsp,
                                       const DenseNet& head, Mode mode) {
  require_len(lp, sp.size(), "long-term vector");
  require_len(lsp, sp.size(), "long-short-term vector");
  return head.forward(concat({user_embedding, sp, lp, lsp}), mode);
}

double predict_rating(std::span<const double> preference, std::span<const double> item_embedding,
                      const DenseNet& head, Mode mode) {
  const auto out = head.forward(concat({preference, item_embedding}), mode);
  if (out.size() != 1) throw ShapeError("rating head must have one output");
  return out[0];
}

// ---- variants -------------------------------------------------------------------

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::NoS: return "NoS";
    case Variant::NoL: return "NoL";
    case Variant::NoLS: return "NoLS";
    case Variant::NoT: return "NoT";
  }
  return "full";
}

Variant variant_from_string(const std::string& s) {
  for (Variant v : all_variants()) {
    if (to_string(v) == s) return v;
  }
  throw ConfigError("unknown variant '" + s + "' (expected full, NoS, NoL, NoLS or NoT)");
}

const std::vector<Variant>& all_variants() {
  static const std::vector<Variant> v = {Variant::Full, Variant::NoS, Variant::NoL, Variant::NoLS, Variant::NoT};
  return v;
}

void CrossNetConfig::validate() const {
  if (topics < 1 || k < 1 || item_dim < 1 || user_dim < 1) throw ConfigError("crossnet dimensions must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
  if (!(init_std > 0.0)) throw ConfigError("init_std must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (!(adam.learning_rate >= 0.0)) throw ConfigError("learning rate must be non-negative");
}

void CrossNetGrads::zero() {
  source_topics.fill(0.0);
  target_topics.fill(0.0);
  attention_source.zero();
  attention_target.zero();
  integrate.zero();
  rating.zero();
  user_embeddings.fill(0.0);
  item_embeddings.fill(0.0);
}

// ---- model ----------------------------------------------------------------------

struct CrossNetModel::NetworkPass {
  Network net = Network::Source;
  std::vector<std::vector<std::pair<std::size_t, double>>> active;  // (topic, frequency) per interval
  std::vector<std::vector<double>> s;                               // s^1..s^t
  std::vector<double> alpha;
  std::vector<ForwardCache> alpha_caches;
  double self = 0.0;
  ForwardCache self_cache;
  std::vector<double> sp, lp, lsp;
  double scale = 1.0;
  bool use_s = true, use_l = true, use_ls = true;
};

struct CrossNetModel::Pass {
  UserKind kind = UserKind::New;
  std::vector<NetworkPass> nets;
  std::size_t user_row = 0;
  ForwardCache integrate_cache;
  std::vector<double> p;
};

CrossNetModel::CrossNetModel(CrossNetConfig config, std::vector<UserId> existing_users, std::vector<ItemId> items)
    : config_(config), existing_users_(std::move(existing_users)), items_(std::move(items)), adam_(config.adam) {
  config_.validate();
  require_sorted_unique(existing_users_, "existing user ids");
  require_sorted_unique(items_, "item ids");
  const auto k = static_cast<std::size_t>(config_.k);
  const auto K = static_cast<std::size_t>(config_.topics);
  const auto D = static_cast<std::size_t>(config_.item_dim);
  const auto Du = static_cast<std::size_t>(config_.user_dim);
  const auto seed = config_.seed;
  source_topics_ = gaussian(K, k, config_.init_std, derive_seed(seed, {0x746f70, 0}));
  target_topics_ = gaussian(K, k, config_.init_std, derive_seed(seed, {0x746f70, 1}));
  attention_source_ = DenseNet::one_hidden(2 * k, 4 * k, 1, Activation::Sigmoid, config_.dropout, derive_seed(seed, {0x617474, 0}));
  attention_target_ = DenseNet::one_hidden(2 * k, 4 * k, 1, Activation::Sigmoid, config_.dropout, derive_seed(seed, {0x617474, 1}));
  const std::size_t integ_in = Du + 6 * k;
  integrate_ = DenseNet::one_hidden(integ_in, 2 * k, k, Activation::Identity, config_.dropout, derive_seed(seed, {0x696e74}));
  rating_ = DenseNet::one_hidden(k + D, 2 * (k + D), 1, Activation::Sigmoid, config_.dropout, derive_seed(seed, {0x726174}));
  user_embeddings_ = gaussian(existing_users_.size(), Du, config_.init_std, derive_seed(seed, {0x757365}));
  item_embeddings_ = gaussian(items_.size(), D, config_.init_std, derive_seed(seed, {0x6974656d}));
}

void CrossNetModel::configure_training(AdamConfig adam, int batch_size, std::uint64_t seed) {
  config_.adam = adam;
  config_.batch_size = batch_size;
  config_.seed = seed;
  config_.validate();
  adam_ = Adam(adam);
}

std::size_t CrossNetModel::item_row(ItemId item) const {
  const auto it = std::lower_bound(items_.begin(), items_.end(), item);
  if (it == items_.end() || *it != item) throw DataError("unknown item " + std::to_string(item));
  return static_cast<std::size_t>(it - items_.begin());
}

std::size_t CrossNetModel::user_row(UserId user) const {
  const auto it = std::lower_bound(existing_users_.begin(), existing_users_.end(), user);
  if (it == existing_users_.end() || *it != user) {
    throw DataError("existing user " + std::to_string(user) + " has no embedding");
  }
  return static_cast<std::size_t>(it - existing_users_.begin());
}

CrossNetModel::NetworkPass CrossNetModel::run_network(const std::vector<std::vector<double>>& stream, Network net,
                                                      int history, Mode mode, std::uint64_t tag, bool keep) const {
  const auto k = static_cast<std::size_t>(config_.k);
  const auto& tbl = table(net);
  const auto& head = attention(net);
  if (history < 1 || static_cast<std::size_t>(history) > stream.size()) {
    throw DataError("history of " + std::to_string(history) + " intervals exceeds the " + to_string(net) +
                    " stream (" + std::to_string(stream.size()) + " intervals)");
  }
  const auto t = static_cast<std::size_t>(history);
  NetworkPass pass;
  pass.net = net;
  pass.use_s = config_.variant != Variant::NoS && config_.variant != Variant::NoT;
  pass.use_l = config_.variant != Variant::NoL && config_.variant != Variant::NoT;
  pass.use_ls = config_.variant != Variant::NoLS && config_.variant != Variant::NoT;
  pass.scale = config_.normalize_history && t > 1 ? 1.0 / static_cast<double>(t - 1) : 1.0;

  pass.active.resize(t);
  pass.s.assign(t, std::vector<double>(k, 0.0));
  for (std::size_t tau = 0; tau < t; ++tau) {
    const auto& snap = stream[tau];
    if (snap.size() != tbl.rows) throw ShapeError("snapshot: length " + len_text(snap.size(), tbl.rows));
    for (std::size_t c = 0; c < snap.size(); ++c) {
      if (snap[c] == 0.0) continue;
      pass.active[tau].emplace_back(c, snap[c]);
      axpy(snap[c], tbl.row(c), pass.s[tau]);
    }
  }
  const auto& current = pass.s[t - 1];
  pass.sp = pass.use_s ? current : std::vector<double>(k, 0.0);
  pass.lp.assign(k, 0.0);
  if (pass.use_l) {
    for (std::size_t tau = 0; tau + 1 < t; ++tau) add_into(pass.lp, pass.s[tau], pass.scale);
  }
  pass.lsp.assign(k, 0.0);
  if (pass.use_ls) {
    pass.alpha.resize(t - 1);
    if (keep) pass.alpha_caches.resize(t - 1);
    for (std::size_t tau = 0; tau + 1 < t; ++tau) {
      pass.alpha[tau] = head.forward(concat({current, pass.s[tau]}), sub_mode(mode, {tag, tau}),
                                     keep ? &pass.alpha_caches[tau] : nullptr)[0];
      add_into(pass.lsp, pass.s[tau], pass.scale * pass.alpha[tau]);
    }
  }
  if (keep) {
    pass.self = head.forward(concat({current, current}), sub_mode(mode, {tag, kTagSelf}), &pass.self_cache)[0];
  }
  return pass;
}

CrossNetModel::Pass CrossNetModel::forward(const UserRecord& user, int history, Mode mode, bool keep) const {
  Pass pass;
  pass.kind = user.kind;
  pass.nets.push_back(run_network(user.source_stream, Network::Source, history, mode, kTagSource, keep));
  if (user.kind == UserKind::New) {
    const auto& n = pass.nets[0];
    pass.p = integrate_new(n.sp, n.lp, n.lsp);
    return pass;
  }
  pass.nets.push_back(run_network(user.target_stream, Network::Target, history, mode, kTagTarget, keep));
  pass.user_row = user_row(user.id);
  const auto& sr = pass.nets[0];
  const auto& tg = pass.nets[1];
  const auto input = concat({user_embeddings_.row(pass.user_row), sr.sp, tg.sp, sr.lp, tg.lp, sr.lsp, tg.lsp});
  pass.p = integrate_.forward(input, sub_mode(mode, {kTagIntegrate}), keep ? &pass.integrate_cache : nullptr);
  return pass;
}

std::vector<double> CrossNetModel::preference(const UserRecord& user, int history, Mode mode) const {
  return forward(user, history, mode, false).p;
}

std::vector<double> CrossNetModel::score(const UserRecord& user, int history, std::span<const ItemId> items) const {
  const auto p = preference(user, history, Mode::eval());
  std::vector<double> out;
  out.reserve(items.size());
  for (ItemId i : items) out.push_back(predict_rating(p, item_embeddings_.row(item_row(i)), rating_, Mode::eval()));
  return out;
}

std::vector<double> CrossNetModel::self_attention(const UserRecord& user, int interval) const {
  std::vector<double> out;
  const auto one = [&](const std::vector<std::vector<double>>& stream, Network net) {
    if (interval < 1 || static_cast<std::size_t>(interval) > stream.size()) {
      throw DataError("interval " + std::to_string(interval) + " outside the " + to_string(net) + " stream");
    }
    const auto s = short_term(embed_interval(stream[interval - 1], table(net)), static_cast<std::size_t>(config_.k));
    if (std::all_of(s.begin(), s.end(), [](double x) { return x == 0.0; })) return;
    out.push_back(attention(net).forward(concat({s, s}), Mode::eval())[0]);
  };
  one(user.source_stream, Network::Source);
  if (user.kind == UserKind::Existing) one(user.target_stream, Network::Target);
  return out;
}

void CrossNetModel::backward_network(const NetworkPass& pass, std::span<const double> d_sp,
                                     std::span<const double> d_lp, std::span<const double> d_lsp, double d_self,
                                     CrossNetGrads& grads) const {
  const auto k = static_cast<std::size_t>(config_.k);
  const std::size_t t = pass.s.size();
  const auto& head = attention(pass.net);
  auto& head_grads = pass.net == Network::Source ? grads.attention_source : grads.attention_target;
  auto& table_grads = pass.net == Network::Source ? grads.source_topics : grads.target_topics;

  std::vector<std::vector<double>> ds(t, std::vector<double>(k, 0.0));
  auto& ds_now = ds[t - 1];
  if (pass.use_s) add_into(ds_now, d_sp);
  if (pass.use_l) {
    for (std::size_t tau = 0; tau + 1 < t; ++tau) add_into(ds[tau], d_lp, pass.scale);
  }
  if (pass.use_ls) {
    for (std::size_t tau = 0; tau + 1 < t; ++tau) {
      const double d_alpha = pass.scale * dot(d_lsp, pass.s[tau]);
      add_into(ds[tau], d_lsp, pass.scale * pass.alpha[tau]);
      const double g[1] = {d_alpha};
      const auto dx = head.backward(pass.alpha_caches[tau], g, head_grads);
      add_into(ds_now, std::span<const double>(dx).first(k));
      add_into(ds[tau], std::span<const double>(dx).subspan(k));
    }
  }
  {
    const double g[1] = {d_self};
    const auto dx = head.backward(pass.self_cache, g, head_grads);
    add_into(ds_now, std::span<const double>(dx).first(k));
    add_into(ds_now, std::span<const double>(dx).subspan(k));
  }
  for (std::size_t tau = 0; tau < t; ++tau) {
    for (const auto& [c, f] : pass.active[tau]) axpy(f, ds[tau], table_grads.row(c));
  }
}

InstanceLoss CrossNetModel::loss(const UserRecord& user, const CrossNetInstance& instance, Mode mode,
                                 CrossNetGrads* grads) const {
  if (instance.positives.empty() || instance.negatives.empty()) {
    throw DataError("instance for user " + std::to_string(user.id) + " needs positives and negatives");
  }
  const auto k = static_cast<std::size_t>(config_.k);
  const auto pass = forward(user, instance.history, mode, true);

  const std::size_t n_pos = instance.positives.size();
  const std::size_t n = n_pos + instance.negatives.size();
  std::vector<std::size_t> rows(n);
  std::vector<double> ratings(n);
  std::vector<ForwardCache> caches(grads ? n : 0);
  for (std::size_t j = 0; j < n; ++j) {
    const ItemId item = j < n_pos ? instance.positives[j] : instance.negatives[j - n_pos];
    rows[j] = item_row(item);
    const auto input = concat({pass.p, item_embeddings_.row(rows[j])});
    ratings[j] = rating_.forward(input, sub_mode(mode, {kTagRating, j}), grads ? &caches[j] : nullptr)[0];
  }
  const std::span<const double> pos(ratings.data(), n_pos);
  const std::span<const double> neg(ratings.data() + n_pos, n - n_pos);

  InstanceLoss out;
  out.listwise = listwise_loss(pos, neg);
  for (const auto& net : pass.nets) out.attention += attention_loss(net.self);
  if (!grads) return out;

  const auto g = listwise_grad(pos, neg);
  std::vector<double> dp(k, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double gj[1] = {j < n_pos ? g.positive[j] : g.negative[j - n_pos]};
    const auto dx = rating_.backward(caches[j], gj, grads->rating);
    add_into(dp, std::span<const double>(dx).first(k));
    add_into(grads->item_embeddings.row(rows[j]), std::span<const double>(dx).subspan(k));
  }

  if (pass.kind == UserKind::New) {
    const auto& net = pass.nets[0];
    backward_network(net, dp, dp, dp, attention_loss_grad(net.self), *grads);
    return out;
  }
  const auto dx = integrate_.backward(pass.integrate_cache, dp, grads->integrate);
  const std::span<const double> d(dx);
  const auto Du = static_cast<std::size_t>(config_.user_dim);
  add_into(grads->user_embeddings.row(pass.user_row), d.first(Du));
  const auto part = [&](std::size_t slot) { return d.subspan(Du + slot * k, k); };
  backward_network(pass.nets[0], part(0), part(2), part(4), attention_loss_grad(pass.nets[0].self), *grads);
  backward_network(pass.nets[1], part(1), part(3), part(5), attention_loss_grad(pass.nets[1].self), *grads);
  return out;
}

CrossNetGrads CrossNetModel::make_grads() const {
  CrossNetGrads g;
  g.source_topics = Matrix(source_topics_.rows, source_topics_.cols);
  g.target_topics = Matrix(target_topics_.rows, target_topics_.cols);
  g.attention_source = attention_source_.make_grads();
  g.attention_target = attention_target_.make_grads();
  g.integrate = integrate_.make_grads();
  g.rating = rating_.make_grads();
  g.user_embeddings = Matrix(user_embeddings_.rows, user_embeddings_.cols);
  g.item_embeddings = Matrix(item_embeddings_.rows, item_embeddings_.cols);
  return g;
}

std::vector<ParamSlot> CrossNetModel::slots(CrossNetGrads& grads) {
  std::vector<ParamSlot> out;
  out.push_back({"topics.source", source_topics_.values, grads.source_topics.values});
  out.push_back({"topics.target", target_topics_.values, grads.target_topics.values});
  const auto append = [&](std::vector<ParamSlot> more) { out.insert(out.end(), more.begin(), more.end()); };
  append(attention_source_.slots(grads.attention_source, "attention.source"));
  append(attention_target_.slots(grads.attention_target, "attention.target"));
  append(integrate_.slots(grads.integrate, "integrate"));
  append(rating_.slots(grads.rating, "rating"));
  out.push_back({"embeddings.users", user_embeddings_.values, grads.user_embeddings.values});
  out.push_back({"embeddings.items", item_embeddings_.values, grads.item_embeddings.values});
  return out;
}

std::size_t CrossNetModel::parameter_count() const {
  return source_topics_.size() + target_topics_.size() + attention_source_.parameter_count() +
         attention_target_.parameter_count() + integrate_.parameter_count() + rating_.parameter_count() +
         user_embeddings_.size() + item_embeddings_.size();
}

EpochLosses CrossNetModel::train_epoch(std::span<const UserRecord> users, std::span<const CrossNetInstance> instances) {
  std::vector<std::size_t> order(instances.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto rng = make_rng(config_.seed, {0x65706f6368, static_cast<std::uint64_t>(epochs_trained_)});
  std::shuffle(order.begin(), order.end(), rng);

  auto grads = make_grads();
  const auto params = slots(grads);
  EpochLosses out;
  out.epoch = epochs_trained_ + 1;
  const auto batch = static_cast<std::size_t>(config_.batch_size);
  for (std::size_t start = 0; start < order.size(); start += batch) {
    const std::size_t stop = std::min(order.size(), start + batch);
    grads.zero();
    for (std::size_t b = start; b < stop; ++b) {
      const auto& inst = instances[order[b]];
      if (inst.user >= users.size()) throw DataError("instance references an unknown user index");
      const auto& user = users[inst.user];
      const auto seed = derive_seed(config_.seed, {0x696e7374, static_cast<std::uint64_t>(epochs_trained_), order[b]});
      const auto l = loss(user, inst, Mode::training(seed), &grads);
      if (!std::isfinite(l.listwise) || !std::isfinite(l.attention)) {
        throw NumericError("non-finite crossnet loss in epoch " + std::to_string(out.epoch));
      }
      if (user.kind == UserKind::New) {
        out.lw_new += l.listwise;
        out.at_new += l.attention;
        ++out.new_instances;
      } else {
        out.lw_existing += l.listwise;
        out.at_existing += l.attention;
        ++out.existing_instances;
      }
    }
    const double inv = 1.0 / static_cast<double>(stop - start);
    for (const auto& s : params) {
      for (double& x : s.grad) x *= inv;
    }
    adam_.step(params);
    ++steps_;
  }
  if (out.new_instances > 0) {
    out.lw_new /= static_cast<double>(out.new_instances);
    out.at_new /= static_cast<double>(out.new_instances);
  }
  if (out.existing_instances > 0) {
    out.lw_existing /= static_cast<double>(out.existing_instances);
    out.at_existing /= static_cast<double>(out.existing_instances);
  }
  ++epochs_trained_;
  return out;
}

// ---- checkpoints ------------------------------------------------------------------

namespace {

void save_net(TensorStore& store, const DenseNet& net, const std::string& prefix) {
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    const auto& layer = net.layers()[l];
    store.add(prefix + ".w" + std::to_string(l), layer.weight);
    Matrix b(1, layer.bias.size());
    b.values = layer.bias;
    store.add(prefix + ".b" + std::to_string(l), std::move(b));
  }
}

void load_net(const TensorStore& store, DenseNet& net, const std::string& prefix) {
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    auto& layer = net.layers()[l];
    layer.weight = store.get(prefix + ".w" + std::to_string(l), layer.weight.rows, layer.weight.cols);
    layer.bias = store.get(prefix + ".b" + std::to_string(l), 1, layer.bias.size()).values;
  }
}

}  // namespace

void CrossNetModel::save(TensorStore& store) const {
  store.set_meta("model", "crossnet");
  store.set_meta("crossnet.topics", std::to_string(config_.topics));
  store.set_meta("crossnet.k", std::to_string(config_.k));
  store.set_meta("crossnet.item_dim", std::to_string(config_.item_dim));
  store.set_meta("crossnet.user_dim", std::to_string(config_.user_dim));
  store.set_meta("crossnet.dropout", std::to_string(config_.dropout));
  store.set_meta("crossnet.normalize_history", config_.normalize_history ? "1" : "0");
  store.set_meta("crossnet.variant", to_string(config_.variant));
  store.set_meta("crossnet.epochs_trained", std::to_string(epochs_trained_));
  store.add("crossnet.existing_users", ids_to_matrix(existing_users_));
  store.add("crossnet.items", ids_to_matrix(items_));
  store.add("crossnet.topics.source", source_topics_);
  store.add("crossnet.topics.target", target_topics_);
  save_net(store, attention_source_, "crossnet.attention.source");
  save_net(store, attention_target_, "crossnet.attention.target");
  save_net(store, integrate_, "crossnet.integrate");
  save_net(store, rating_, "crossnet.rating");
  store.add("crossnet.embeddings.users", user_embeddings_);
  store.add("crossnet.embeddings.items", item_embeddings_);
}

CrossNetModel CrossNetModel::load(const TensorStore& store) {
  if (!store.has_meta("model") || store.meta("model") != "crossnet") {
    throw DataError("checkpoint does not hold a crossnet model");
  }
  CrossNetConfig cfg;
  try {
    cfg.topics = std::stoi(store.meta("crossnet.topics"));
    cfg.k = std::stoi(store.meta("crossnet.k"));
    cfg.item_dim = std::stoi(store.meta("crossnet.item_dim"));
    cfg.user_dim = std::stoi(store.meta("crossnet.user_dim"));
    cfg.dropout = std::stod(store.meta("crossnet.dropout"));
  } catch (const std::logic_error&) {
    throw DataError("checkpoint has malformed crossnet metadata");
  }
  cfg.normalize_history = store.meta("crossnet.normalize_history") == "1";
  cfg.variant = variant_from_string(store.meta("crossnet.variant"));
  CrossNetModel m(cfg, matrix_to_ids(store.get("crossnet.existing_users")), matrix_to_ids(store.get("crossnet.items")));
  const auto K = static_cast<std::size_t>(cfg.topics);
  const auto k = static_cast<std::size_t>(cfg.k);
  m.source_topics_ = store.get("crossnet.topics.source", K, k);
  m.target_topics_ = store.get("crossnet.topics.target", K, k);
  load_net(store, m.attention_source_, "crossnet.attention.source");
  load_net(store, m.attention_target_, "crossnet.attention.target");
  load_net(store, m.integrate_, "crossnet.integrate");
  load_net(store, m.rating_, "crossnet.rating");
  m.user_embeddings_ = store.get("crossnet.embeddings.users", m.existing_users_.size(), static_cast<std::size_t>(cfg.user_dim));
  m.item_embeddings_ = store.get("crossnet.embeddings.items", m.items_.size(), static_cast<std::size_t>(cfg.item_dim));
  m.epochs_trained_ = std::stoi(store.meta("crossnet.epochs_trained"));
  return m;
}

}  // namespace xnetrec
