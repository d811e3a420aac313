#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "roadnet/evaluate.hpp"
#include "roadnet/point_pattern.hpp"

namespace {

using namespace roadnet;

void BM_RipleyK(benchmark::State& state) {
  const auto w = StudyWindow::box({0, 0, 100, 100});
  std::mt19937_64 gen(1);
  const auto pts = testing::uniform_points(static_cast<std::size_t>(state.range(0)), w, gen);
  const auto d = default_distance_grid(w);
  for (auto _ : state) benchmark::DoNotOptimize(ripley_k(pts, w, d));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RipleyK)->RangeMultiplier(2)->Range(128, 2048)->Complexity();

void BM_CsrEnvelope(benchmark::State& state) {
  const auto w = StudyWindow::box({0, 0, 100, 100});
  const auto d = default_distance_grid(w);
  for (auto _ : state) {
    benchmark::DoNotOptimize(csr_envelope(578, w, d, 9, 42, static_cast<unsigned>(state.range(0))));
  }
}
BENCHMARK(BM_CsrEnvelope)->Arg(1)->Arg(4)->UseRealTime();

void BM_Loocv(benchmark::State& state) {
  std::mt19937_64 gen(2);
  auto s = testing::samples_at(testing::uniform_locations(80, 300, gen));
  testing::fill_gaussian_process(s, 60.0, gen);
  const auto method = static_cast<Method>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(loocv_errors(method, s, {}));
  state.SetLabel(std::string(to_string(method)));
}
BENCHMARK(BM_Loocv)->DenseRange(0, 2);

void BM_CrsBasis(benchmark::State& state) {
  double r = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(crs_basis(r, 0.1));
    r = r < 400.0 ? r * 1.01 : 0.5;
  }
}
BENCHMARK(BM_CrsBasis);

} // namespace

BENCHMARK_MAIN();
