#include "xnetrec/run_config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "xnetrec/errors.hpp"

namespace xnetrec {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw ConfigError("key '" + key + "': expected " + expected + ", got '" + value + "'");
}

template <class T>
T parse_integer(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, value, "an integer");
  return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& origin) {
  KeyValueConfig cfg;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    const std::string where = origin + ":" + std::to_string(number) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const auto key = trim(text.substr(0, eq));
    if (key.empty()) throw ConfigError(where + "empty key");
    if (cfg.values_.contains(key)) throw ConfigError(where + "duplicate key '" + key + "'");
    cfg.values_[key] = trim(text.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse(in, path.string());
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  if (key.empty() || key.find_first_of("=#\n") != std::string::npos) throw ConfigError("invalid key '" + key + "'");
  if (value.find('\n') != std::string::npos) throw ConfigError("value of '" + key + "' spans lines");
  values_[key] = value;
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  const auto v = get(key);
  return v ? parse_integer<int>(key, *v) : fallback;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto v = get(key);
  return v ? parse_integer<std::uint64_t>(key, *v) : fallback;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  std::istringstream in(*v);
  double out = 0.0;
  if (!(in >> out) || !(in >> std::ws).eof()) bad_value(key, *v, "a number");
  return out;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1") return true;
  if (*v == "false" || *v == "0") return false;
  bad_value(key, *v, "true or false");
}

std::vector<int> KeyValueConfig::get_int_list(const std::string& key) const {
  std::vector<int> out;
  const auto v = get(key);
  if (!v || v->empty()) return out;
  std::istringstream in(*v);
  std::string part;
  while (std::getline(in, part, ',')) out.push_back(parse_integer<int>(key, trim(part)));
  return out;
}

void KeyValueConfig::require_known(const std::set<std::string>& known) const {
  std::string unknown;
  for (const auto& [k, v] : values_) {
    if (!known.contains(k)) unknown += (unknown.empty() ? "" : ", ") + k;
  }
  if (!unknown.empty()) throw ConfigError("unknown config keys: " + unknown);
}

std::string KeyValueConfig::serialize() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

void KeyValueConfig::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << serialize();
}

std::uint64_t KeyValueConfig::digest(const std::set<std::string>& ignore) const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [k, v] : values_) {
    if (ignore.contains(k)) continue;
    for (char c : k + " = " + v + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

const std::set<std::string>& run_config_keys() {
  static const std::set<std::string> keys = {
      "model",   "data",        "seed",         "split",       "holdout_fraction", "granularity",
      "train_intervals", "test_intervals", "epochs", "dim",   "lr",               "batch_users",
      "negatives", "weight_decay", "neg_ratio",  "batch_size",  "samples_per_epoch", "k",
      "item_dim", "user_dim",    "dropout",      "init_std",    "normalize_history", "variant",
      "negative_ratio", "incremental_epochs", "out"};
  return keys;
}

const std::set<std::string>& model_names() {
  static const std::set<std::string> names = {"mf-pointwise", "mf-bpr", "mf-listwise", "crossnet", "pop", "timepop"};
  return names;
}

ListwiseMFConfig listwise_config_from(const KeyValueConfig& kv) {
  ListwiseMFConfig c;
  c.dim = kv.get_int("dim", c.dim);
  c.epochs = kv.get_int("epochs", c.epochs);
  c.learning_rate = kv.get_double("lr", c.learning_rate);
  c.batch_users = kv.get_int("batch_users", c.batch_users);
  c.weight_decay = kv.get_double("weight_decay", c.weight_decay);
  c.seed = kv.get_u64("seed", c.seed);
  c.negatives = negative_policy_from_string(kv.get_string("negatives", to_string(c.negatives)), c.seed);
  return c;
}

PointwiseMFConfig pointwise_config_from(const KeyValueConfig& kv) {
  PointwiseMFConfig c;
  c.dim = kv.get_int("dim", c.dim);
  c.epochs = kv.get_int("epochs", c.epochs);
  c.learning_rate = kv.get_double("lr", c.learning_rate);
  c.neg_ratio = kv.get_int("neg_ratio", c.neg_ratio);
  c.batch_size = kv.get_int("batch_size", c.batch_size);
  c.seed = kv.get_u64("seed", c.seed);
  return c;
}

BprMFConfig bpr_config_from(const KeyValueConfig& kv) {
  BprMFConfig c;
  c.dim = kv.get_int("dim", c.dim);
  c.epochs = kv.get_int("epochs", c.epochs);
  c.learning_rate = kv.get_double("lr", c.learning_rate);
  c.samples_per_epoch = kv.get_u64("samples_per_epoch", c.samples_per_epoch);
  c.weight_decay = kv.get_double("weight_decay", c.weight_decay);
  c.batch_size = kv.get_int("batch_size", c.batch_size);
  c.seed = kv.get_u64("seed", c.seed);
  return c;
}

CrossNetRunConfig crossnet_config_from(const KeyValueConfig& kv, int topics) {
  CrossNetRunConfig c;
  auto& m = c.model;
  m.topics = topics;
  m.k = kv.get_int("k", m.k);
  m.item_dim = kv.get_int("item_dim", m.item_dim);
  m.user_dim = kv.get_int("user_dim", m.user_dim);
  m.dropout = kv.get_double("dropout", m.dropout);
  m.init_std = kv.get_double("init_std", m.init_std);
  m.normalize_history = kv.get_bool("normalize_history", m.normalize_history);
  m.variant = variant_from_string(kv.get_string("variant", to_string(m.variant)));
  m.adam.learning_rate = kv.get_double("lr", m.adam.learning_rate);
  m.batch_size = kv.get_int("batch_size", m.batch_size);
  m.seed = kv.get_u64("seed", m.seed);
  c.epochs = kv.get_int("epochs", c.epochs);
  c.train_intervals = kv.get_int("train_intervals", c.train_intervals);
  c.test_intervals = kv.get_int("test_intervals", c.test_intervals);
  c.negative_ratio = kv.get_double("negative_ratio", c.negative_ratio);
  c.incremental_epochs = kv.get_int("incremental_epochs", c.incremental_epochs);
  m.validate();
  return c;
}

std::uint64_t run_digest(const KeyValueConfig& kv) { return kv.digest({"out"}); }

const std::set<std::string>& synth_config_keys() {
  static const std::set<std::string> keys = {"users",           "items",          "topics",
                                             "intervals",       "new_user_fraction", "base_sparsity",
                                             "outlier_intervals", "outlier_strength", "drift_rate",
                                             "seed",            "origin"};
  return keys;
}

SynthConfig synth_config_from(const KeyValueConfig& kv) {
  SynthConfig c;
  c.users = kv.get_int("users", c.users);
  c.items = kv.get_int("items", c.items);
  c.topics = kv.get_int("topics", c.topics);
  c.intervals = kv.get_int("intervals", c.intervals);
  c.new_user_fraction = kv.get_double("new_user_fraction", c.new_user_fraction);
  c.base_sparsity = kv.get_double("base_sparsity", c.base_sparsity);
  c.outlier_intervals = kv.get_int_list("outlier_intervals");
  c.outlier_strength = kv.get_double("outlier_strength", c.outlier_strength);
  c.drift_rate = kv.get_double("drift_rate", c.drift_rate);
  c.seed = kv.get_u64("seed", c.seed);
  c.origin = kv.get_u64("origin", static_cast<std::uint64_t>(c.origin));
  c.validate();
  return c;
}

KeyValueConfig to_key_values(const SynthConfig& c) {
  const auto real = [](double x) {
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
  };
  KeyValueConfig kv;
  kv.set("users", std::to_string(c.users));
  kv.set("items", std::to_string(c.items));
  kv.set("topics", std::to_string(c.topics));
  kv.set("intervals", std::to_string(c.intervals));
  kv.set("new_user_fraction", real(c.new_user_fraction));
  kv.set("base_sparsity", real(c.base_sparsity));
  std::string outliers;
  for (int t : c.outlier_intervals) outliers += (outliers.empty() ? "" : ",") + std::to_string(t);
  kv.set("outlier_intervals", outliers);
  kv.set("outlier_strength", real(c.outlier_strength));
  kv.set("drift_rate", real(c.drift_rate));
  kv.set("seed", std::to_string(c.seed));
  kv.set("origin", std::to_string(c.origin));
  return kv;
}

}  // namespace xnetrec
