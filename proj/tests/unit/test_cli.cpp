#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "commands.hpp"
#include "helpers.hpp"
#include "xnetrec/run_config.hpp"
#include "xnetrec/tensor_store.hpp"

using namespace xnetrec;
using xnetrec::testing::read_text;
using xnetrec::testing::TempDir;
using xnetrec::testing::write_text;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

// Small MovieLens-format log: 12 users x 15 items, roughly half filled.
void write_ratings(const std::filesystem::path& p) {
  std::string text;
  for (int u = 1; u <= 12; ++u) {
    for (int i = 1; i <= 15; ++i) {
      if ((u * 7 + i * 3) % 5 < 3) {
        text += std::to_string(u) + "::" + std::to_string(i) + "::4::" + std::to_string(978300000 + u * 1000 + i) + "\n";
      }
    }
  }
  write_text(p, text);
}

std::vector<std::string> synth_args(const TempDir& dir) {
  return {"synth", "--set", "users=20", "--set", "items=30", "--set", "topics=8", "--set", "intervals=5",
          "--set", "base_sparsity=0.7", "--out", (dir / "syn").string()};
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).code, cli::kUsage);
  EXPECT_EQ(invoke({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(invoke({"--help"}).code, cli::kOk);
  EXPECT_EQ(invoke({"train", "--model", "mf-magic", "--data", "x"}).code, cli::kUsage);
  EXPECT_EQ(invoke({"train", "--data", "x"}).code, cli::kUsage);
}

TEST(Cli, IngestReportsCountsAndSparsity) {
  TempDir dir;
  write_ratings(dir / "ratings.dat");
  const auto r = invoke({"ingest", "--format", "movielens", (dir / "ratings.dat").string(), "--out", (dir / "ml").string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto manifest = KeyValueConfig::load(dir / "ml" / "manifest.cfg");
  const int n = manifest.get_int("interactions", 0);
  EXPECT_EQ(manifest.get_int("users", 0), 12);
  EXPECT_EQ(manifest.get_int("items", 0), 15);
  EXPECT_NEAR(manifest.get_double("sparsity", 0), 1.0 - n / 180.0, 1e-12);
  EXPECT_NE(r.out.find("interactions " + std::to_string(n)), std::string::npos) << r.out;
  EXPECT_EQ(invoke({"ingest", (dir / "absent.dat").string(), "--out", (dir / "x").string()}).code, cli::kData);
  EXPECT_EQ(invoke({"ingest", "--format", "csv", (dir / "ratings.dat").string()}).code, cli::kUsage);
}

TEST(Cli, IngestDefaultsToEnvironmentRoot) {
  TempDir dir;
  std::filesystem::create_directories(dir / "raw" / "ml-tiny");
  write_ratings(dir / "raw" / "ml-tiny" / "ratings.dat");
  ::setenv("XNETREC_OUT", (dir / "root").c_str(), 1);
  const auto r = invoke({"ingest", (dir / "raw" / "ml-tiny" / "ratings.dat").string()});
  ::unsetenv("XNETREC_OUT");
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "root" / "ml-tiny" / "interactions.csv"));
}

TEST(Cli, SynthIsByteIdenticalAndValidated) {
  TempDir a, b;
  ASSERT_EQ(invoke(synth_args(a)).code, cli::kOk);
  ASSERT_EQ(invoke(synth_args(b)).code, cli::kOk);
  for (const char* f : {"interactions.csv", "snapshots.csv", "user_kinds.csv", "item_topics.csv", "manifest.cfg"}) {
    EXPECT_EQ(read_text(a / "syn" / f), read_text(b / "syn" / f)) << f;
  }
  const auto manifest = KeyValueConfig::load(a / "syn" / "manifest.cfg");
  KeyValueConfig synth;
  for (const auto& [k, v] : manifest.values()) {
    if (k.starts_with("synth.")) synth.set(k.substr(6), v);
  }
  EXPECT_EQ(manifest.get_string("config_digest", ""), hex64(synth.digest()));
  EXPECT_EQ(invoke({"synth", "--set", "users=0", "--out", (a / "bad").string()}).code, cli::kUsage);
  EXPECT_EQ(invoke({"synth", "--set", "colour=blue", "--out", (a / "bad").string()}).code, cli::kUsage);
}

TEST(Cli, TrainEvalMfListwiseDeterministically) {
  TempDir dir;
  write_ratings(dir / "ratings.dat");
  ASSERT_EQ(invoke({"ingest", (dir / "ratings.dat").string(), "--out", (dir / "ml").string()}).code, cli::kOk);
  const auto train = [&](const std::string& out) {
    return invoke({"train", "--model", "mf-listwise", "--data", (dir / "ml").string(), "--d", "4", "--epochs", "5",
                "--seed", "3", "--out", (dir / out).string()});
  };
  const auto t1 = train("r1");
  ASSERT_EQ(t1.code, cli::kOk) << t1.err;
  ASSERT_EQ(train("r2").code, cli::kOk);
  EXPECT_EQ(read_text(dir / "r1" / "checkpoint.tensors"), read_text(dir / "r2" / "checkpoint.tensors"));
  EXPECT_EQ(read_text(dir / "r1" / "trace.csv"), read_text(dir / "r2" / "trace.csv"));
  EXPECT_EQ(read_text(dir / "r1" / "run.cfg"), read_text(dir / "r2" / "run.cfg"));

  ASSERT_EQ(invoke({"eval", "--run", (dir / "r1").string()}).code, cli::kOk);
  ASSERT_EQ(invoke({"eval", "--run", (dir / "r1").string(), "--out", (dir / "e2").string()}).code, cli::kOk);
  for (const char* f : {"summary.csv", "auc.csv", "hr@10.csv", "novelty.csv", "metadata.csv"}) {
    EXPECT_EQ(read_text(dir / "r1" / "eval" / f), read_text(dir / "e2" / f)) << f;
  }
  const auto meta = read_text(dir / "e2" / "metadata.csv");
  EXPECT_NE(meta.find("config_digest,"), std::string::npos);
  EXPECT_NE(meta.find("top_n,10"), std::string::npos);

  const auto sub = invoke({"eval", "--run", (dir / "r1").string(), "--metrics", "auc", "--out", (dir / "e3").string()});
  ASSERT_EQ(sub.code, cli::kOk);
  EXPECT_FALSE(std::filesystem::exists(dir / "e3" / "hr@10.csv"));
  EXPECT_EQ(invoke({"eval", "--run", (dir / "r1").string(), "--metrics", "ndcg"}).code, cli::kUsage);
}

TEST(Cli, ZeroEpochCheckpointEqualsInit) {
  TempDir dir;
  write_ratings(dir / "ratings.dat");
  ASSERT_EQ(invoke({"ingest", (dir / "ratings.dat").string(), "--out", (dir / "ml").string()}).code, cli::kOk);
  ASSERT_EQ(invoke({"train", "--model", "mf-bpr", "--data", (dir / "ml").string(), "--d", "4", "--epochs", "0", "--seed",
                 "5", "--out", (dir / "r").string()})
                .code,
            cli::kOk);
  const auto p = MFParams::load(TensorStore::load(dir / "r" / "checkpoint.tensors"));
  const auto init = MFParams::init(p.users, p.items, 4, 5);
  EXPECT_EQ(p.user_factors, init.user_factors);
  EXPECT_EQ(p.item_factors, init.item_factors);
}

TEST(Cli, ResumeChecksDigest) {
  TempDir dir;
  write_ratings(dir / "ratings.dat");
  ASSERT_EQ(invoke({"ingest", (dir / "ratings.dat").string(), "--out", (dir / "ml").string()}).code, cli::kOk);
  const std::vector<std::string> base = {"train", "--model", "pop", "--data", (dir / "ml").string(), "--out",
                                         (dir / "r").string(), "--resume"};
  ASSERT_EQ(invoke(base).code, cli::kOk);
  const auto again = invoke(base);
  EXPECT_EQ(again.code, cli::kOk);
  EXPECT_NE(again.out.find("already complete"), std::string::npos);
  auto changed = base;
  changed.insert(changed.end(), {"--seed", "9"});
  const auto r = invoke(changed);
  EXPECT_EQ(r.code, cli::kUsage);
  EXPECT_NE(r.err.find("digest"), std::string::npos) << r.err;
}

TEST(Cli, EvalRejectsMismatchedCheckpoint) {
  TempDir dir;
  write_ratings(dir / "ratings.dat");
  ASSERT_EQ(invoke({"ingest", (dir / "ratings.dat").string(), "--out", (dir / "ml").string()}).code, cli::kOk);
  ASSERT_EQ(invoke({"train", "--model", "pop", "--data", (dir / "ml").string(), "--out", (dir / "pop").string()}).code,
            cli::kOk);
  ASSERT_EQ(invoke({"train", "--model", "mf-pointwise", "--data", (dir / "ml").string(), "--epochs", "1", "--d", "2",
                 "--out", (dir / "pw").string()})
                .code,
            cli::kOk);
  EXPECT_EQ(invoke({"eval", "--run", (dir / "pw").string(), "--checkpoint", (dir / "pop" / "checkpoint.tensors").string()})
                .code,
            cli::kData);
  EXPECT_EQ(invoke({"eval", "--run", (dir / "nowhere").string()}).code, cli::kData);
}

TEST(Cli, CrossnetTrainEvalAndAblate) {
  TempDir dir;
  ASSERT_EQ(invoke(synth_args(dir)).code, cli::kOk);
  const std::string data = (dir / "syn").string();
  const std::vector<std::string> common = {"--set", "k=4",  "--set", "item_dim=4",        "--set", "user_dim=2",
                                           "--set", "train_intervals=3", "--set", "test_intervals=2"};
  std::vector<std::string> train = {"train", "--model", "crossnet", "--data", data, "--epochs", "2", "--out",
                                    (dir / "cn").string()};
  train.insert(train.end(), common.begin(), common.end());
  const auto t = invoke(train);
  ASSERT_EQ(t.code, cli::kOk) << t.err;
  EXPECT_EQ(read_text(dir / "cn" / "trace_new.csv").substr(0, 22), "epoch,L_lw,L_at,total\n");
  const auto e = invoke({"eval", "--run", (dir / "cn").string()});
  ASSERT_EQ(e.code, cli::kOk) << e.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "cn" / "eval" / "diversity.csv"));

  std::vector<std::string> ablate = {"ablate", "--data", data, "--seeds", "1,2", "--set", "epochs=1", "--out",
                                     (dir / "ab").string()};
  ablate.insert(ablate.end(), common.begin(), common.end());
  const auto a = invoke(ablate);
  ASSERT_EQ(a.code, cli::kOk) << a.err;
  const auto table = read_text(dir / "ab" / "ablation.csv");
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 6);
  EXPECT_NE(table.find("full,"), std::string::npos);
  EXPECT_NE(table.find(",1,2\n"), std::string::npos);
  const auto runs = read_text(dir / "ab" / "ablation_runs.csv");
  EXPECT_EQ(std::count(runs.begin(), runs.end(), '\n'), 11);
  EXPECT_EQ(invoke({"ablate", "--model", "mf-bpr", "--data", data}).code, cli::kUsage);
}
