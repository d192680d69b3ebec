#include <gtest/gtest.h>

#include <sstream>

#include "helpers.hpp"
#include "xnetrec/errors.hpp"
#include "xnetrec/run_config.hpp"

using namespace xnetrec;
using xnetrec::testing::TempDir;

namespace {
KeyValueConfig parse(const std::string& text) {
  std::istringstream in(text);
  return KeyValueConfig::parse(in, "test.cfg");
}
}  // namespace

TEST(KeyValueConfig, ParsesCommentsAndWhitespace) {
  const auto kv = parse("# header\n\n  users = 400  \noutlier_intervals=10,11\nname = a b\n");
  EXPECT_EQ(kv.get_int("users", 0), 400);
  EXPECT_EQ(kv.get_int_list("outlier_intervals"), (std::vector<int>{10, 11}));
  EXPECT_EQ(kv.get_string("name", ""), "a b");
  EXPECT_EQ(kv.get_int("missing", 7), 7);
  EXPECT_TRUE(kv.get_int_list("missing").empty());
}

TEST(KeyValueConfig, Errors) {
  try {
    parse("a = 1\nbroken\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("test.cfg:2:"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse("a = 1\na = 2\n"), ConfigError);
  EXPECT_THROW(parse(" = 2\n"), ConfigError);
  const auto kv = parse("n = x\nb = maybe\nu = -1\nd = 1.5e\n");
  EXPECT_THROW(kv.get_int("n", 0), ConfigError);
  EXPECT_THROW(kv.get_bool("b", false), ConfigError);
  EXPECT_THROW(kv.get_u64("u", 0), ConfigError);
  EXPECT_THROW(kv.get_double("d", 0), ConfigError);
  EXPECT_THROW(kv.require_known({"n", "b", "u"}), ConfigError);
  EXPECT_THROW(KeyValueConfig::load("/nonexistent/x.cfg"), ConfigError);
}

TEST(KeyValueConfig, TypedValues) {
  const auto kv = parse("t = true\nf = 0\nx = 0.25\nbig = 18446744073709551615\n");
  EXPECT_TRUE(kv.get_bool("t", false));
  EXPECT_FALSE(kv.get_bool("f", true));
  EXPECT_EQ(kv.get_double("x", 0), 0.25);
  EXPECT_EQ(kv.get_u64("big", 0), 18446744073709551615ULL);
}

TEST(KeyValueConfig, SerializeSaveLoadAndDigest) {
  TempDir dir;
  auto kv = parse("b = 2\na = 1\n");
  EXPECT_EQ(kv.serialize(), "a = 1\nb = 2\n");
  kv.save(dir / "c.cfg");
  const auto back = KeyValueConfig::load(dir / "c.cfg");
  EXPECT_EQ(back.values(), kv.values());
  EXPECT_EQ(back.digest(), kv.digest());
  EXPECT_EQ(parse("a = 1\nb = 2\n").digest(), kv.digest());
  auto other = kv;
  other.set("b", "3");
  EXPECT_NE(other.digest(), kv.digest());
  other.set("out", "x");
  EXPECT_EQ(other.digest({"out"}), parse("a = 1\nb = 3\n").digest());
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
  EXPECT_THROW(kv.set("bad key=", "1"), ConfigError);
}

TEST(KeyValueConfig, DigestIsFnv1aOfSerializedText) {
  const auto kv = parse("a = 1\n");
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : std::string("a = 1\n")) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  EXPECT_EQ(kv.digest(), h);
}

TEST(RunConfig, RunDigestIgnoresOut) {
  auto a = parse("model = mf-bpr\ndata = d\n");
  auto b = a;
  b.set("out", "elsewhere");
  EXPECT_EQ(run_digest(a), run_digest(b));
  EXPECT_TRUE(run_config_keys().contains("negatives"));
  EXPECT_TRUE(model_names().contains("timepop"));
}

TEST(RunConfig, ModelReaders) {
  const auto kv = parse("dim = 8\nepochs = 3\nlr = 0.02\nnegatives = sample:4\nseed = 9\nweight_decay = 0.001\n");
  const auto lw = listwise_config_from(kv);
  EXPECT_EQ(lw.dim, 8);
  EXPECT_EQ(lw.epochs, 3);
  EXPECT_EQ(lw.learning_rate, 0.02);
  EXPECT_EQ(lw.negatives.kind, NegativePolicy::Kind::Sample);
  EXPECT_EQ(lw.seed, 9u);
  EXPECT_EQ(lw.weight_decay, 0.001);
  EXPECT_EQ(bpr_config_from(kv).weight_decay, 0.001);
  EXPECT_EQ(pointwise_config_from(kv).dim, 8);

  const auto cn = crossnet_config_from(parse("k = 8\nvariant = NoLS\nnegative_ratio = 0\nseed = 4\n"), 16);
  EXPECT_EQ(cn.model.topics, 16);
  EXPECT_EQ(cn.model.k, 8);
  EXPECT_EQ(cn.model.variant, Variant::NoLS);
  EXPECT_EQ(cn.model.seed, 4u);
  EXPECT_EQ(cn.negative_ratio, 0.0);
  EXPECT_THROW(crossnet_config_from(parse("variant = NoQ\n"), 16), ConfigError);
}

TEST(RunConfig, SynthRoundTrip) {
  const auto kv = parse("users = 50\noutlier_intervals = 3,4\noutlier_strength = 2.5\ndrift_rate = 0.1\nseed = 8\n");
  const auto c = synth_config_from(kv);
  EXPECT_EQ(c.users, 50);
  EXPECT_EQ(c.outlier_intervals, (std::vector<int>{3, 4}));
  const auto back = synth_config_from(to_key_values(c));
  EXPECT_EQ(back.users, c.users);
  EXPECT_EQ(back.outlier_intervals, c.outlier_intervals);
  EXPECT_EQ(back.outlier_strength, c.outlier_strength);
  EXPECT_EQ(back.base_sparsity, c.base_sparsity);
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(to_key_values(back).digest(), to_key_values(c).digest());
  EXPECT_THROW(synth_config_from(parse("users = 0\n")), ConfigError);
  EXPECT_TRUE(synth_config_keys().contains("drift_rate"));
}
