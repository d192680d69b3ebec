#include "commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "xnetrec/crossnet_run.hpp"
#include "xnetrec/data.hpp"
#include "xnetrec/errors.hpp"
#include "xnetrec/io.hpp"
#include "xnetrec/metrics.hpp"
#include "xnetrec/mf.hpp"
#include "xnetrec/popularity.hpp"
#include "xnetrec/report.hpp"
#include "xnetrec/run_config.hpp"
#include "xnetrec/synth.hpp"
#include "xnetrec/tensor_store.hpp"

namespace xnetrec::cli {

namespace fs = std::filesystem;

fs::path default_output_root() {
  const char* env = std::getenv("XNETREC_OUT");
  return env && *env ? fs::path(env) : fs::path("runs");
}

namespace {

// ---- dataset directories ---------------------------------------------------------

struct Dataset {
  fs::path dir;
  KeyValueConfig manifest;
  std::vector<Interaction> interactions;

  bool synthetic() const { return manifest.get_string("kind", "") == "synth"; }
  std::vector<Interaction> target() const {
    std::vector<Interaction> out;
    for (const auto& r : interactions) {
      if (r.network == Network::Target) out.push_back(r);
    }
    return out;
  }
};

Dataset load_dataset(const fs::path& dir) {
  if (!fs::exists(dir / "manifest.cfg")) throw DataError("'" + dir.string() + "' is not a dataset directory (no manifest.cfg)");
  Dataset d;
  d.dir = dir;
  d.manifest = KeyValueConfig::load(dir / "manifest.cfg");
  d.interactions = io::read_interactions(dir / "interactions.csv");
  return d;
}

IntervalGrid dataset_grid(const Dataset& d, const KeyValueConfig& run) {
  if (d.synthetic()) {
    IntervalGrid g;
    g.origin = static_cast<Timestamp>(d.manifest.get_u64("origin", 0));
    g.granularity = granularity_from_string(d.manifest.get_string("granularity", "biweekly"));
    g.count = d.manifest.get_int("intervals", 1);
    return g;
  }
  const auto target = d.target();
  return IntervalGrid::covering(target, granularity_from_string(run.get_string("granularity", "monthly")));
}

CrossNetData load_crossnet_data(const Dataset& d) {
  if (!d.synthetic() && !fs::exists(d.dir / "snapshots.csv")) {
    throw DataError("dataset '" + d.dir.string() + "' has no topical snapshots; the crossnet model needs them");
  }
  const auto snapshots = io::read_snapshots(d.dir / "snapshots.csv");
  const auto kinds = io::read_user_kinds(d.dir / "user_kinds.csv");
  std::map<ItemId, std::vector<double>> topics;
  if (fs::exists(d.dir / "item_topics.csv")) topics = io::read_item_topics(d.dir / "item_topics.csv");
  return CrossNetData::assemble(dataset_grid(d, {}), d.interactions, snapshots, kinds, std::move(topics));
}

std::map<ItemId, std::vector<double>> load_item_topics(const fs::path& dir) {
  if (!fs::exists(dir / "item_topics.csv")) return {};
  return io::read_item_topics(dir / "item_topics.csv");
}

// ---- small writers ------------------------------------------------------------------

void write_pairs(const fs::path& path, std::span<const std::pair<UserId, ItemId>> pairs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "user,item\n";
  for (const auto& [u, i] : pairs) out << u << ',' << i << '\n';
}

std::vector<std::pair<UserId, ItemId>> read_pairs(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  std::vector<std::pair<UserId, ItemId>> out;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto f = io::split_line(line);
    try {
      if (f.size() != 2) throw std::invalid_argument("fields");
      out.emplace_back(std::stoll(f[0]), std::stoll(f[1]));
    } catch (const std::logic_error&) {
      throw DataError(path.string() + ":" + std::to_string(number) + ": expected user,item");
    }
  }
  return out;
}

void write_mf_trace(const fs::path& path, std::span<const EpochStats> trace) {
  std::ofstream out(path, std::ios::binary);
  out << "epoch,mean_pos,mean_neg,var_pos,var_neg,loss\n";
  for (const auto& s : trace) {
    out << s.epoch << ',' << io::format_real(s.mean_pos) << ',' << io::format_real(s.mean_neg) << ','
        << io::format_real(s.var_pos) << ',' << io::format_real(s.var_neg) << ',' << io::format_real(s.loss) << '\n';
  }
}

void write_crossnet_traces(const fs::path& dir, std::span<const EpochLosses> trace) {
  std::ofstream n(dir / "trace_new.csv", std::ios::binary);
  std::ofstream e(dir / "trace_existing.csv", std::ios::binary);
  n << "epoch,L_lw,L_at,total\n";
  e << "epoch,L_lw,L_at,total\n";
  for (const auto& t : trace) {
    n << t.epoch << ',' << io::format_real(t.lw_new) << ',' << io::format_real(t.at_new) << ','
      << io::format_real(t.lw_new + t.at_new) << '\n';
    e << t.epoch << ',' << io::format_real(t.lw_existing) << ',' << io::format_real(t.at_existing) << ','
      << io::format_real(t.lw_existing + t.at_existing) << '\n';
  }
}

std::set<std::string> parse_metrics(const std::string& list) {
  std::set<std::string> out;
  std::istringstream in(list);
  std::string m;
  while (std::getline(in, m, ',')) {
    if (m.empty()) continue;
    if (!known_metrics().contains(m)) throw ConfigError("unknown metric '" + m + "' (expected hr, auc, novelty, diversity)");
    out.insert(m);
  }
  if (out.empty()) throw ConfigError("no metrics selected");
  return out;
}

void apply_overrides(KeyValueConfig& kv, const std::vector<std::string>& sets) {
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + s + "'");
    kv.set(s.substr(0, eq), s.substr(eq + 1));
  }
}

// ---- ingest ---------------------------------------------------------------------------

struct IngestArgs {
  std::string format = "movielens";
  std::string input;
  std::string out;
};

int cmd_ingest(const IngestArgs& a, std::ostream& out) {
  std::vector<Interaction> raw;
  if (a.format == "movielens") {
    raw = ingest_movielens(a.input);
  } else {
    raw = io::read_interactions(a.input);
  }
  const auto records = binarize(raw);
  const auto users = distinct_users(records);
  const auto items = distinct_items(records);
  const double filled = static_cast<double>(records.size()) /
                        (static_cast<double>(users.size()) * static_cast<double>(items.size()));
  const fs::path dir = a.out.empty() ? default_output_root() / fs::path(a.input).parent_path().filename() : fs::path(a.out);
  fs::create_directories(dir);
  io::write_interactions(dir / "interactions.csv", records);

  KeyValueConfig m;
  m.set("kind", "interactions");
  m.set("format", a.format);
  m.set("source", fs::path(a.input).filename().string());
  m.set("records", std::to_string(raw.size()));
  m.set("interactions", std::to_string(records.size()));
  m.set("users", std::to_string(users.size()));
  m.set("items", std::to_string(items.size()));
  m.set("sparsity", io::format_real(1.0 - filled));
  m.save(dir / "manifest.cfg");

  out << "records " << raw.size() << ", interactions " << records.size() << ", users " << users.size()
      << ", items " << items.size() << ", sparsity " << std::fixed << std::setprecision(2) << 100.0 * (1.0 - filled)
      << "%\n"
      << std::defaultfloat << "wrote " << dir.string() << '\n';
  return kOk;
}

// ---- synth -------------------------------------------------------------------------------

struct SynthArgs {
  std::string config;
  std::string out;
  std::vector<std::string> sets;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  auto kv = a.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(a.config);
  apply_overrides(kv, a.sets);
  kv.require_known(synth_config_keys());
  const auto config = synth_config_from(kv);
  const auto normalized = to_key_values(config);
  const auto digest = hex64(normalized.digest());
  const fs::path dir = a.out.empty() ? default_output_root() / ("synth-" + digest.substr(0, 8)) : fs::path(a.out);

  const auto ds = generate(config);
  fs::create_directories(dir);
  io::write_interactions(dir / "interactions.csv", ds.interactions);
  io::write_snapshots(dir / "snapshots.csv", ds.snapshots());
  io::write_user_kinds(dir / "user_kinds.csv", ds.kinds());
  io::write_item_topics(dir / "item_topics.csv", ds.target_item_topics());

  KeyValueConfig m;
  m.set("kind", "synth");
  for (const auto& [k, v] : normalized.values()) m.set("synth." + k, v);
  m.set("config_digest", digest);
  m.set("origin", std::to_string(ds.grid.origin));
  m.set("granularity", to_string(ds.grid.granularity));
  m.set("intervals", std::to_string(ds.grid.count));
  m.set("topics", std::to_string(config.topics));
  m.set("interactions", std::to_string(ds.interactions.size()));
  m.save(dir / "manifest.cfg");

  std::size_t new_users = 0;
  for (const auto& u : ds.users) new_users += u.kind == UserKind::New ? 1 : 0;
  out << "users " << ds.users.size() << " (" << new_users << " new), target items " << ds.target_catalog.size()
      << ", interactions " << ds.interactions.size() << ", digest " << digest << '\n'
      << "wrote " << dir.string() << '\n';
  return kOk;
}

// ---- train -------------------------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::string model;
  std::string data;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<int> dim;
  std::optional<double> lr;
  std::string split;
  std::string negatives;
  std::string variant;
  std::vector<std::string> sets;
  bool resume = false;
};

KeyValueConfig assemble_run_config(const TrainArgs& a) {
  auto kv = a.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(a.config);
  if (!a.model.empty()) kv.set("model", a.model);
  if (!a.data.empty()) kv.set("data", a.data);
  if (a.seed) kv.set("seed", std::to_string(*a.seed));
  if (a.epochs) kv.set("epochs", std::to_string(*a.epochs));
  if (a.dim) kv.set("dim", std::to_string(*a.dim));
  if (a.lr) kv.set("lr", io::format_real(*a.lr));
  if (!a.split.empty()) kv.set("split", a.split);
  if (!a.negatives.empty()) kv.set("negatives", a.negatives);
  if (!a.variant.empty()) kv.set("variant", a.variant);
  apply_overrides(kv, a.sets);
  kv.erase("out");
  kv.require_known(run_config_keys());
  const auto model = kv.get("model");
  if (!model) throw ConfigError("no model given (--model)");
  if (!model_names().contains(*model)) {
    throw ConfigError("unknown model '" + *model + "' (expected mf-pointwise, mf-bpr, mf-listwise, crossnet, pop, timepop)");
  }
  if (!kv.get("data")) throw ConfigError("no dataset given (--data)");
  return kv;
}

struct SplitFiles {
  std::vector<Interaction> train;
  std::vector<Interaction> test;
  std::vector<std::pair<UserId, ItemId>> test_negatives;
};

SplitFiles make_split(const Dataset& d, const KeyValueConfig& kv) {
  const auto target = d.target();
  const auto kind = kv.get_string("split", "holdout");
  const auto seed = kv.get_u64("seed", 1);
  SplitFiles s;
  if (kind == "holdout") {
    auto h = random_holdout(target, kv.get_double("holdout_fraction", 0.1), seed);
    s.train = std::move(h.train);
    s.test = std::move(h.test_positives);
    s.test_negatives = std::move(h.test_negatives);
  } else if (kind == "temporal") {
    const auto grid = dataset_grid(d, kv);
    const int n = kv.get_int("train_intervals", 0);
    const int m = kv.get_int("test_intervals", 0);
    temporal_split(grid, {n, m});
    for (const auto& [t, rows] : slice_intervals(target, grid)) {
      auto& dst = t <= n ? s.train : s.test;
      if (t <= n + m) dst.insert(dst.end(), rows.begin(), rows.end());
    }
    if (s.train.empty()) throw DataError("empty training window");
    if (s.test.empty()) throw DataError("empty test window");
  } else {
    throw ConfigError("unknown split '" + kind + "' (expected holdout or temporal)");
  }
  return s;
}

void save_pop(TensorStore& store, const std::string& model, const std::map<ItemId, double>& scores) {
  store.set_meta("model", model);
  std::vector<std::int64_t> ids;
  Matrix values(scores.size(), 1);
  std::size_t r = 0;
  for (const auto& [item, score] : scores) {
    ids.push_back(item);
    values(r++, 0) = score;
  }
  store.add("pop.items", ids_to_matrix(ids));
  store.add("pop.scores", std::move(values));
}

std::map<ItemId, double> load_pop(const TensorStore& store) {
  const auto ids = matrix_to_ids(store.get("pop.items"));
  const auto& values = store.get("pop.scores", ids.size(), 1);
  std::map<ItemId, double> out;
  for (std::size_t r = 0; r < ids.size(); ++r) out.emplace(ids[r], values(r, 0));
  return out;
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const auto kv = assemble_run_config(a);
  const auto digest = hex64(run_digest(kv));
  const auto model = *kv.get("model");
  const fs::path dir = a.out.empty() ? default_output_root() / (model + "-" + digest.substr(0, 8)) : fs::path(a.out);

  if (a.resume && fs::exists(dir / "run.cfg")) {
    const auto previous = KeyValueConfig::load(dir / "run.cfg");
    const auto previous_digest = hex64(run_digest(previous));
    if (previous_digest != digest) {
      throw ConfigError("config digest mismatch: " + dir.string() + " holds run " + previous_digest +
                        ", requested " + digest);
    }
    if (fs::exists(dir / "status.cfg") && KeyValueConfig::load(dir / "status.cfg").get_string("state", "") == "complete") {
      out << "run " << digest << " already complete in " << dir.string() << '\n';
      return kOk;
    }
  }

  const auto data = load_dataset(kv.get_string("data", ""));
  fs::create_directories(dir);
  fs::remove(dir / "status.cfg");
  kv.save(dir / "run.cfg");
  TensorStore store;
  store.set_meta("config_digest", digest);

  if (model == "crossnet") {
    const auto cdata = load_crossnet_data(data);
    const auto cfg = crossnet_config_from(kv, cdata.topics);
    auto result = train_crossnet(cdata, cfg, [&](const EpochLosses& e, const CrossNetModel&) {
      out << "epoch " << e.epoch << "  new " << e.lw_new + e.at_new << "  existing " << e.lw_existing + e.at_existing << '\n';
    });
    write_crossnet_traces(dir, result.trace);
    result.model.save(store);
  } else {
    const auto split = make_split(data, kv);
    io::write_interactions(dir / "train.csv", split.train);
    io::write_interactions(dir / "test.csv", split.test);
    write_pairs(dir / "test_negatives.csv", split.test_negatives);

    if (model == "pop") {
      save_pop(store, model, pop_scores(split.train));
    } else if (model == "timepop") {
      if (kv.get_string("split", "holdout") != "temporal") throw ConfigError("timepop needs split = temporal");
      save_pop(store, model, timepop_scores(split.train, dataset_grid(data, kv), kv.get_int("train_intervals", 0)));
    } else {
      const auto target = data.target();
      std::vector<std::pair<UserId, ItemId>> held;
      for (const auto& r : split.test) held.emplace_back(r.user, r.item);
      held.insert(held.end(), split.test_negatives.begin(), split.test_negatives.end());
      const auto ds = ImplicitDataset::build(split.train, distinct_users(target), distinct_items(target), held);
      std::vector<EpochStats> trace;
      const EpochCallback log = [&](int epoch, const MFParams& p) {
        auto s = listwise_stats(ds, p);
        s.epoch = epoch;
        trace.push_back(s);
        out << "epoch " << epoch << "  loss " << s.loss << '\n';
      };
      MFParams params;
      if (model == "mf-listwise") {
        params = train_listwise(ds, listwise_config_from(kv), log).params;
      } else if (model == "mf-bpr") {
        params = train_bpr(ds, bpr_config_from(kv), log);
      } else {
        params = train_pointwise(ds, pointwise_config_from(kv), log);
      }
      write_mf_trace(dir / "trace.csv", trace);
      params.save(store);
      store.set_meta("model", model);
    }
  }
  store.save(dir / "checkpoint.tensors");

  KeyValueConfig status;
  status.set("config_digest", digest);
  status.set("state", "complete");
  status.save(dir / "status.cfg");
  out << "wrote " << dir.string() << '\n';
  return kOk;
}

// ---- eval ---------------------------------------------------------------------------------

struct EvalArgs {
  std::string run;
  std::string checkpoint;
  std::string metrics;
  std::size_t n = 10;
  std::string out;
};

EvalReport evaluate_run(const fs::path& run, const TensorStore& store, const KeyValueConfig& kv, EvalOptions options,
                        bool metrics_given) {
  const auto model = kv.get_string("model", "");
  const auto stored = store.has_meta("model") ? store.meta("model") : std::string("?");
  if (stored != model) throw DataError("checkpoint holds a '" + stored + "' model but the run is '" + model + "'");
  const auto data = load_dataset(kv.get_string("data", ""));
  const auto topics = load_item_topics(data.dir);
  if (!metrics_given && !topics.empty()) options.metrics.insert("diversity");

  if (model == "crossnet") {
    const auto cdata = load_crossnet_data(data);
    auto cfg = crossnet_config_from(kv, cdata.topics);
    cfg.eval = options;
    auto m = CrossNetModel::load(store);
    if (m.config().variant != cfg.model.variant || m.config().k != cfg.model.k) {
      throw DataError("checkpoint does not match the run configuration");
    }
    m.configure_training(cfg.model.adam, cfg.model.batch_size, cfg.model.seed);
    return evaluate_crossnet(m, cdata, cfg);
  }

  HoldoutSplit split;
  split.train = io::read_interactions(run / "train.csv");
  split.test_positives = io::read_interactions(run / "test.csv");
  split.test_negatives = read_pairs(run / "test_negatives.csv");
  auto task = kv.get_string("split", "holdout") == "holdout" ? holdout_task(split)
                                                             : temporal_task(split.train, split.test_positives);
  if (!topics.empty()) task.item_topics = &topics;

  if (model == "pop" || model == "timepop") {
    const auto scores = load_pop(store);
    const BatchScorer scorer = [&](UserId, std::span<const ItemId> items) {
      std::vector<double> s;
      for (ItemId i : items) {
        const auto it = scores.find(i);
        s.push_back(it == scores.end() ? 0.0 : it->second);
      }
      return s;
    };
    return evaluate(scorer, task, options);
  }
  const auto params = MFParams::load(store);
  const BatchScorer scorer = [&](UserId user, std::span<const ItemId> items) {
    std::vector<double> s;
    const auto u = params.user_index(user);
    for (ItemId i : items) {
      const auto it = params.item_index(i);
      s.push_back(u && it ? params.predict_index(*u, *it) : 0.0);
    }
    return s;
  };
  return evaluate(scorer, task, options);
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const fs::path run(a.run);
  if (!fs::exists(run / "run.cfg")) throw DataError("'" + run.string() + "' is not a run directory (no run.cfg)");
  const auto kv = KeyValueConfig::load(run / "run.cfg");
  const fs::path ckpt = a.checkpoint.empty() ? run / "checkpoint.tensors" : fs::path(a.checkpoint);
  const auto store = TensorStore::load(ckpt);
  EvalOptions options;
  if (a.n < 1) throw ConfigError("--n must be >= 1");
  options.n = a.n;
  if (!a.metrics.empty()) options.metrics = parse_metrics(a.metrics);

  auto report = evaluate_run(run, store, kv, options, !a.metrics.empty());
  report.set_metadata("config_digest", hex64(run_digest(kv)));
  report.set_metadata("seed", std::to_string(kv.get_u64("seed", 1)));
  report.set_metadata("model", kv.get_string("model", ""));
  report.set_metadata("dataset", fs::path(kv.get_string("data", "")).filename().string());
  const fs::path dir = a.out.empty() ? run / "eval" : fs::path(a.out);
  report.write(dir);

  out << std::left << std::setw(12) << "metric" << std::setw(12) << "mean" << "users  excluded\n";
  for (const auto& [name, s] : report.summary()) {
    out << std::setw(12) << name << std::setw(12) << std::setprecision(4) << std::fixed << s.mean << std::defaultfloat
        << std::setw(7) << s.users << s.excluded << '\n';
  }
  out << "wrote " << dir.string() << '\n';
  return kOk;
}

// ---- ablate -------------------------------------------------------------------------------

struct AblateArgs {
  std::string config;
  std::string data;
  std::string model = "crossnet";
  std::string seeds = "1,2,3";
  std::string out;
  std::vector<std::string> sets;
};

int cmd_ablate(const AblateArgs& a, std::ostream& out) {
  if (a.model != "crossnet") throw ConfigError("ablation applies to the crossnet model only, not '" + a.model + "'");
  auto kv = a.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(a.config);
  if (!a.data.empty()) kv.set("data", a.data);
  kv.set("model", "crossnet");
  apply_overrides(kv, a.sets);
  kv.erase("out");
  kv.erase("variant");
  kv.require_known(run_config_keys());
  if (!kv.get("data")) throw ConfigError("no dataset given (--data)");
  KeyValueConfig seed_list;
  seed_list.set("seeds", a.seeds);
  const auto seeds = seed_list.get_int_list("seeds");
  if (seeds.empty()) throw ConfigError("no seeds given");

  const auto data = load_crossnet_data(load_dataset(kv.get_string("data", "")));
  const auto digest = hex64(run_digest(kv));
  const fs::path dir = a.out.empty() ? default_output_root() / ("ablate-" + digest.substr(0, 8)) : fs::path(a.out);
  fs::create_directories(dir);
  kv.save(dir / "run.cfg");

  const auto base = crossnet_config_from(kv, data.topics);
  const std::string hr = hr_name(base.eval.n);
  std::ofstream runs(dir / "ablation_runs.csv", std::ios::binary);
  runs << "variant,seed," << hr << '\n';
  std::ofstream table(dir / "ablation.csv", std::ios::binary);
  table << "variant," << hr << ",seeds\n";
  out << "variant  " << hr << '\n';
  for (Variant v : all_variants()) {
    double sum = 0.0;
    for (int seed : seeds) {
      auto cfg = base;
      cfg.model.variant = v;
      cfg.model.seed = static_cast<std::uint64_t>(seed);
      cfg.eval.metrics = {"hr"};
      auto trained = train_crossnet(data, cfg);
      const auto summary = evaluate_crossnet(trained.model, data, cfg).summary();
      const double value = summary.contains(hr) ? summary.at(hr).mean : 0.0;
      runs << to_string(v) << ',' << seed << ',' << io::format_real(value) << '\n';
      sum += value;
    }
    const double mean = sum / static_cast<double>(seeds.size());
    table << to_string(v) << ',' << io::format_real(mean) << ',' << a.seeds << '\n';
    out << std::left << std::setw(9) << to_string(v) << std::fixed << std::setprecision(4) << mean << std::defaultfloat
        << '\n';
  }
  out << "seeds " << a.seeds << "\nwrote " << dir.string() << '\n';
  return kOk;
}

}  // namespace

CrossNetData load_crossnet_dir(const fs::path& dir) { return load_crossnet_data(load_dataset(dir)); }

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cross-network recommendation experiments", "xnetrec"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* ci = app.add_subcommand("ingest", "Convert a raw log into a dataset directory");
  ci->add_option("--format", ingest.format, "Input format")->check(CLI::IsMember({"movielens", "interactions"}));
  ci->add_option("input", ingest.input, "Input file")->required();
  ci->add_option("--out", ingest.out, "Dataset directory");

  SynthArgs synth;
  auto* cs = app.add_subcommand("synth", "Generate a synthetic two-network dataset");
  cs->add_option("--config", synth.config, "Synthetic dataset config (key = value)");
  cs->add_option("--set", synth.sets, "Override one config key (key=value)");
  cs->add_option("--out", synth.out, "Dataset directory");

  TrainArgs train;
  auto* ct = app.add_subcommand("train", "Train a model and write checkpoint and trace");
  ct->add_option("--config", train.config, "Run config (key = value)");
  ct->add_option("--model", train.model, "mf-pointwise | mf-bpr | mf-listwise | crossnet | pop | timepop");
  ct->add_option("--data", train.data, "Dataset directory");
  ct->add_option("--seed", train.seed, "Seed");
  ct->add_option("--epochs", train.epochs, "Training epochs");
  ct->add_option("--d,--dim", train.dim, "MF latent dimension");
  ct->add_option("--lr", train.lr, "Adam learning rate");
  ct->add_option("--split", train.split, "holdout | temporal");
  ct->add_option("--negatives", train.negatives, "full | sample:<ratio> (mf-listwise)");
  ct->add_option("--variant", train.variant, "full | NoS | NoL | NoLS | NoT (crossnet)");
  ct->add_option("--set", train.sets, "Override one config key (key=value)");
  ct->add_option("--out", train.out, "Run directory");
  ct->add_flag("--resume", train.resume, "Skip a completed run with the same config digest");

  EvalArgs eval;
  auto* ce = app.add_subcommand("eval", "Evaluate a trained run");
  ce->add_option("--run", eval.run, "Run directory")->required();
  ce->add_option("--checkpoint", eval.checkpoint, "Checkpoint to evaluate instead of the run's own");
  ce->add_option("--metrics", eval.metrics, "Comma-separated subset of hr,auc,novelty,diversity");
  ce->add_option("--n", eval.n, "Top-N list length");
  ce->add_option("--out", eval.out, "Report directory (default <run>/eval)");

  AblateArgs ablate;
  auto* ca = app.add_subcommand("ablate", "Compare the full crossnet model with its ablations");
  ca->add_option("--config", ablate.config, "Run config (key = value)");
  ca->add_option("--data", ablate.data, "Dataset directory");
  ca->add_option("--model", ablate.model, "Model to ablate (crossnet)");
  ca->add_option("--seeds", ablate.seeds, "Comma-separated seeds");
  ca->add_option("--set", ablate.sets, "Override one config key (key=value)");
  ca->add_option("--out", ablate.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (ci->parsed()) return cmd_ingest(ingest, out);
    if (cs->parsed()) return cmd_synth(synth, out);
    if (ct->parsed()) return cmd_train(train, out);
    if (ce->parsed()) return cmd_eval(eval, out);
    if (ca->parsed()) return cmd_ablate(ablate, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"xnetrec"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace xnetrec::cli
