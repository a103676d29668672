#include <benchmark/benchmark.h>

#include <vector>

#include "mano/io.hpp"

namespace {

void BM_NpyEncodeParse(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> values(n * 10);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(i) * 0.25;
  const auto array = mano::io::ArrayFile::from_f64(values, {n, 10});
  for (auto _ : state) {
    const auto image = mano::io::encode_npy(array);
    benchmark::DoNotOptimize(mano::io::parse_npy(image));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(values.size() * sizeof(double)));
}
BENCHMARK(BM_NpyEncodeParse)->Arg(1000)->Arg(100000);

}  // namespace
