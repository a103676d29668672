#include <benchmark/benchmark.h>

#include <random>

#include "mano/baselines.hpp"
#include "mano/mano.hpp"
#include "mano/numerics.hpp"

namespace {

mano::LogitsMatrix make_logits(std::size_t n, std::size_t k, double scale) {
  std::mt19937_64 gen(n * 131 + k);
  std::uniform_real_distribution<double> u(-scale, scale);
  mano::Matrix m(n, k);
  for (double& v : m.values()) v = u(gen);
  return mano::LogitsMatrix(std::move(m));
}

void BM_ManoTaylor(benchmark::State& state) {
  const auto logits = make_logits(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(mano::mano_score(logits));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ManoTaylor)->Args({1000, 10})->Args({10000, 10})->Args({10000, 100});

void BM_ManoSoftmax(benchmark::State& state) {
  const auto logits = make_logits(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)), 20.0);
  for (auto _ : state) benchmark::DoNotOptimize(mano::mano_score(logits));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ManoSoftmax)->Args({10000, 10})->Args({10000, 100});

void BM_Nuclear(benchmark::State& state) {
  const auto logits = make_logits(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)), 3.0);
  for (auto _ : state) benchmark::DoNotOptimize(mano::nuclear_score(logits));
}
BENCHMARK(BM_Nuclear)->Args({10000, 10})->Args({10000, 100});

void BM_ConfScore(benchmark::State& state) {
  const auto logits = make_logits(static_cast<std::size_t>(state.range(0)), 10, 3.0);
  for (auto _ : state) benchmark::DoNotOptimize(mano::conf_score(logits));
}
BENCHMARK(BM_ConfScore)->Arg(10000);

void BM_Cot(benchmark::State& state) {
  const auto logits = make_logits(static_cast<std::size_t>(state.range(0)), 10, 3.0);
  const mano::SourceInfo source;
  for (auto _ : state) benchmark::DoNotOptimize(mano::cot_score(logits, source));
}
BENCHMARK(BM_Cot)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
