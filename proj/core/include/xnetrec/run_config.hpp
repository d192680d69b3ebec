#pragma once

// Flat `key = value` configuration files.
//
//   # comment
//   users = 400
//   outlier_intervals = 10,11
//
// Keys are unique; blank lines and lines starting with '#' are ignored.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "xnetrec/crossnet_run.hpp"
#include "xnetrec/mf.hpp"
#include "xnetrec/synth.hpp"

namespace xnetrec {

class KeyValueConfig {
 public:
  // Throws ConfigError naming `origin` and the line on malformed input.
  static KeyValueConfig parse(std::istream& in, const std::string& origin);
  static KeyValueConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  void erase(const std::string& key) { values_.erase(key); }
  bool contains(const std::string& key) const { return values_.contains(key); }
  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

  // Typed lookups returning `fallback` when the key is absent; ConfigError on
  // an unparsable value.
  std::string get_string(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<int> get_int_list(const std::string& key) const;

  // Throws ConfigError listing keys outside `known`.
  void require_known(const std::set<std::string>& known) const;

  // Sorted `key = value` lines.
  std::string serialize() const;
  void save(const std::filesystem::path& path) const;

  // FNV-1a 64 over the serialized form without the `ignore` keys.
  std::uint64_t digest(const std::set<std::string>& ignore = {}) const;

 private:
  std::map<std::string, std::string> values_;
};

std::string hex64(std::uint64_t v);

// ---- experiment runs ------------------------------------------------------------
//
// Run configuration keys (all optional unless noted):
//
//   model               mf-pointwise | mf-bpr | mf-listwise | crossnet | pop | timepop (required)
//   data                dataset directory (required)
//   seed                base seed for splits, initialization and sampling
//   split               holdout | temporal
//   holdout_fraction    share of positives and of non-interacted pairs held out
//   granularity         biweekly | monthly (temporal split of plain interaction data)
//   train_intervals     n, temporal split
//   test_intervals      m, temporal split
//   epochs, dim, lr, batch_users, negatives, weight_decay, neg_ratio, batch_size,
//   samples_per_epoch   MF trainers
//   k, item_dim, user_dim, dropout, init_std, normalize_history, variant,
//   batch_size, negative_ratio, incremental_epochs
//                       cross-network model
//   out                 output directory (not part of the digest)

const std::set<std::string>& run_config_keys();
const std::set<std::string>& model_names();

ListwiseMFConfig listwise_config_from(const KeyValueConfig& kv);
PointwiseMFConfig pointwise_config_from(const KeyValueConfig& kv);
BprMFConfig bpr_config_from(const KeyValueConfig& kv);
// `topics` defaults to the dataset's topic count.
CrossNetRunConfig crossnet_config_from(const KeyValueConfig& kv, int topics);

// Digest identifying a run: every key except `out`.
std::uint64_t run_digest(const KeyValueConfig& kv);

const std::set<std::string>& synth_config_keys();
SynthConfig synth_config_from(const KeyValueConfig& kv);
KeyValueConfig to_key_values(const SynthConfig& config);

}  // namespace xnetrec
