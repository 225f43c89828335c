#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "phsdcs/filters.hpp"
#include "phsdcs/random.hpp"
#include "phsdcs/sensing.hpp"
#include "phsdcs/solvers.hpp"
#include "phsdcs/transform.hpp"

using namespace phsdcs;

namespace {

Image noise_image(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> px(n * n);
  for (auto& v : px) v = 255.0 * rng.uniform();
  return Image(n, n, std::move(px));
}

TransformHandle handle(BasisKind kind, std::size_t n) {
  return kind == BasisKind::phsd ? TransformHandle::phsd(n, n) : TransformHandle::daub2d(n, n);
}

void BM_FilterPair(benchmark::State& state) {
  const FilterSpec spec{static_cast<int>(state.range(0)), 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(make_filter_pair(spec));
}
BENCHMARK(BM_FilterPair)->Arg(1)->Arg(2)->Arg(3);

void BM_FilterBank(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    FilterBank bank(n, n, kDefaultOrder, kDefaultLevels, 1.0);
    benchmark::DoNotOptimize(bank.distinct_pairs());
  }
}
BENCHMARK(BM_FilterBank)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_RoundTrip(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto kind = static_cast<BasisKind>(state.range(1));
  const auto t = handle(kind, n);
  const auto img = noise_image(n, 1);
  for (auto _ : state) {
    auto pyr = transform_forward(img, t);
    benchmark::DoNotOptimize(transform_inverse(pyr, t));
  }
  state.SetLabel(kind == BasisKind::phsd ? "phsd" : "daub2d");
}
BENCHMARK(BM_RoundTrip)
    ->ArgsProduct({{64, 256}, {int(BasisKind::phsd), int(BasisKind::daub2d)}})
    ->Unit(benchmark::kMillisecond);

void BM_Measure(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto mask = radial_mask(n, 50, std::min<std::size_t>(100, n), true);
  const auto img = noise_image(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(measure(img, mask));
}
BENCHMARK(BM_Measure)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_SolverIteration(benchmark::State& state) {
  constexpr std::size_t n = 256;
  const auto method = static_cast<SolverMethod>(state.range(0));
  const ComposedOperator op(radial_mask(n, 50, 100, true), TransformHandle::phsd(n, n));
  const auto y = measure(noise_image(n, 3), op.mask());
  SolverConfig cfg;
  cfg.method = method;
  cfg.iterations = 10;
  cfg.step_override = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(solve(op, y.values, cfg));
  state.SetItemsProcessed(state.iterations() * cfg.iterations);
  state.SetLabel(to_string(method) + ", 10 iterations");
}
BENCHMARK(BM_SolverIteration)
    ->Arg(int(SolverMethod::bp))
    ->Arg(int(SolverMethod::lasso))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
