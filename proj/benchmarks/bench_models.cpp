#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "xnetrec/crossnet.hpp"
#include "xnetrec/mf.hpp"
#include "xnetrec/nn.hpp"

namespace {

using namespace xnetrec;

void BM_DenseForward(benchmark::State& state) {
  const auto in = static_cast<std::size_t>(state.range(0));
  const auto net = DenseNet::one_hidden(in, 2 * in, 1, Activation::Sigmoid, 0.0, 1);
  const std::vector<double> x(in, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x, Mode::eval()));
}
BENCHMARK(BM_DenseForward)->Arg(16)->Arg(64)->Arg(256);

void BM_DenseBackward(benchmark::State& state) {
  const auto in = static_cast<std::size_t>(state.range(0));
  const auto net = DenseNet::one_hidden(in, 2 * in, 1, Activation::Sigmoid, 0.3, 1);
  const std::vector<double> x(in, 0.1);
  ForwardCache cache;
  net.forward(x, Mode::training(7), &cache);
  auto grads = net.make_grads();
  const double g[1] = {1.0};
  for (auto _ : state) benchmark::DoNotOptimize(net.backward(cache, g, grads));
}
BENCHMARK(BM_DenseBackward)->Arg(16)->Arg(64)->Arg(256);

// 200 users x 400 items, about 5% filled.
ImplicitDataset synthetic_implicit() {
  std::mt19937_64 rng(5);
  std::vector<Interaction> rows;
  std::vector<UserId> users;
  std::vector<ItemId> items;
  for (UserId u = 0; u < 200; ++u) users.push_back(u);
  for (ItemId i = 0; i < 400; ++i) items.push_back(i);
  for (UserId u : users) {
    for (ItemId i : items) {
      if (rng() % 20 == 0) {
        Interaction r;
        r.user = u;
        r.item = i;
        rows.push_back(r);
      }
    }
  }
  return ImplicitDataset::build(rows, users, items);
}

void BM_ListwiseMFEpoch(benchmark::State& state) {
  const auto data = synthetic_implicit();
  ListwiseMFConfig c;
  c.dim = static_cast<int>(state.range(0));
  c.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train_listwise(data, c));
}
BENCHMARK(BM_ListwiseMFEpoch)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_BprMFEpoch(benchmark::State& state) {
  const auto data = synthetic_implicit();
  BprMFConfig c;
  c.dim = static_cast<int>(state.range(0));
  c.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train_bpr(data, c));
}
BENCHMARK(BM_BprMFEpoch)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_CrossNetLoss(benchmark::State& state) {
  CrossNetConfig c;
  c.topics = 64;
  std::vector<ItemId> items;
  for (ItemId i = 0; i < 100; ++i) items.push_back(i);
  const CrossNetModel model(c, {1}, items);
  UserRecord user;
  user.id = 1;
  user.kind = UserKind::Existing;
  std::mt19937_64 rng(9);
  for (auto* stream : {&user.source_stream, &user.target_stream}) {
    stream->assign(12, std::vector<double>(64, 0.0));
    for (auto& snap : *stream) snap[rng() % 64] = 1.0;
  }
  CrossNetInstance inst{0, static_cast<int>(state.range(0)), {1, 2, 3}, {}};
  for (ItemId i = 10; i < 30; ++i) inst.negatives.push_back(i);
  auto grads = model.make_grads();
  for (auto _ : state) benchmark::DoNotOptimize(model.loss(user, inst, Mode::training(3), &grads));
}
BENCHMARK(BM_CrossNetLoss)->Arg(2)->Arg(11)->Unit(benchmark::kMicrosecond);

}  // namespace
