#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"
#include "xnetrec/errors.hpp"
#include "xnetrec/tensor_store.hpp"

using namespace xnetrec;
using xnetrec::testing::read_text;
using xnetrec::testing::TempDir;
using xnetrec::testing::write_text;

TEST(TensorStore, RoundTripIsBitExact) {
  TempDir dir;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(3, 4);
  for (double& x : a.values) x = g(rng);
  a(0, 0) = 5e-324;
  TensorStore store;
  store.set_meta("model", "crossnet");
  store.set_meta("note", "two words");
  store.add("w", a);
  store.add("ids", ids_to_matrix({3, 1, 9007199254740991LL}));
  store.save(dir / "t.tensors");

  const auto back = TensorStore::load(dir / "t.tensors");
  EXPECT_EQ(back.meta("model"), "crossnet");
  EXPECT_EQ(back.meta("note"), "two words");
  EXPECT_EQ(back.get("w"), a);
  EXPECT_EQ(back.get("w", 3, 4), a);
  EXPECT_THROW(back.get("w", 4, 3), ShapeError);
  EXPECT_THROW(back.get("v"), DataError);
  EXPECT_THROW(back.meta("absent"), DataError);
  EXPECT_EQ(matrix_to_ids(back.get("ids")), (std::vector<std::int64_t>{3, 1, 9007199254740991LL}));

  back.save(dir / "u.tensors");
  EXPECT_EQ(read_text(dir / "t.tensors"), read_text(dir / "u.tensors"));
}

TEST(TensorStore, HeaderAndManifest) {
  TempDir dir;
  TensorStore store;
  store.add("b", Matrix(1, 2, 0.5));
  store.save(dir / "t.tensors");
  EXPECT_EQ(read_text(dir / "t.tensors"), "xnetrec-tensors 1\nmanifest 1\nb 1 2\ntensor b\n0.5 0.5\nend\n");
}

TEST(TensorStore, RejectsCorruptFiles) {
  TempDir dir;
  write_text(dir / "v.tensors", "xnetrec-tensors 2\nmanifest 0\nend\n");
  EXPECT_THROW(TensorStore::load(dir / "v.tensors"), DataError);
  write_text(dir / "trunc.tensors", "xnetrec-tensors 1\nmanifest 1\nb 1 2\ntensor b\n0.5\n");
  EXPECT_THROW(TensorStore::load(dir / "trunc.tensors"), DataError);
  EXPECT_THROW(TensorStore::load(dir / "missing.tensors"), DataError);
  TensorStore store;
  store.add("x", Matrix(1, 1));
  EXPECT_THROW(store.add("x", Matrix(1, 1)), ConfigError);
}
