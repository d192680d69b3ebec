#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "xnetrec/listwise_loss.hpp"
#include "xnetrec/metrics.hpp"

namespace {

std::vector<double> uniform(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

void BM_ListwiseLoss(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto pos = uniform(n / 10 + 1, 1), neg = uniform(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(xnetrec::listwise_loss(pos, neg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pos.size() + neg.size()));
}
BENCHMARK(BM_ListwiseLoss)->Range(16, 4096);

void BM_ListwiseGrad(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto pos = uniform(n / 10 + 1, 1), neg = uniform(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(xnetrec::listwise_grad(pos, neg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pos.size() + neg.size()));
}
BENCHMARK(BM_ListwiseGrad)->Range(16, 4096);

void BM_AucUser(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto pos = uniform(n / 10 + 1, 3), neg = uniform(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(xnetrec::auc_user(pos, neg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pos.size() + neg.size()));
}
BENCHMARK(BM_AucUser)->Range(16, 4096);

}  // namespace
