#include <benchmark/benchmark.h>

#include <cmath>

#include "qpbeam/linear_solvers.hpp"
#include "qpbeam/nash_moser.hpp"
#include "qpbeam/nonlinearity.hpp"
#include "qpbeam/oracle.hpp"

using namespace qpbeam;

namespace {

FrequencyVector golden() { return FrequencyVector::normalized({1.0, 0.5 * (std::sqrt(5.0) - 1.0)}); }

FourierField sample(int N, std::uint64_t seed, double size = 0.05) {
  std::vector<std::vector<int>> js = {{1}, {2}};
  FourierField v = random_field(2, 1, N, js, 1.0, 0.8, seed);
  v *= size / sobolev_norm(v, NormSpec{0, 6});
  return v;
}

}  // namespace

static void BM_Multiply(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  FourierField a = sample(N, 1), b = sample(N, 2);
  for (auto _ : state) benchmark::DoNotOptimize(multiply(a, b, N));
}
BENCHMARK(BM_Multiply)->Arg(8)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

static void BM_SobolevNorm(benchmark::State& state) {
  FourierField a = sample(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(sobolev_norm(a, NormSpec{0.3, 2}));
}
BENCHMARK(BM_SobolevNorm)->Arg(16)->Arg(64);

static void BM_DampingDF(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  DampingLinearization lin(sample(N, 4), golden());
  FourierField h = sample(N, 5);
  for (auto _ : state) benchmark::DoNotOptimize(lin.DF(h, N));
}
BENCHMARK(BM_DampingDF)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

static void BM_InvertDiagonal(benchmark::State& state) {
  const DiagonalSymbol D{0.0375, 0.0, golden()};
  FourierField h = sample(static_cast<int>(state.range(0)), 6, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(invert_diagonal(D, h));
}
BENCHMARK(BM_InvertDiagonal)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

static void BM_InvertLinearized(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  FourierField v = sample(N, 7), h = sample(N, 8, 1.0);
  LinearizedOptions o;
  o.s = 2;
  LinearizedSolver S(v, golden(), 0.0375, N, o);
  for (auto _ : state) benchmark::DoNotOptimize(S.solve(h));
}
BENCHMARK(BM_InvertLinearized)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_ReferenceRun(benchmark::State& state) {
  ScheduleParams p;
  p.levels = static_cast<int>(state.range(0));
  const Schedule s = build_schedule(p);
  std::vector<std::pair<ModeIndex, cplx>> g = {{ModeIndex{{1, 0}, {1}}, 0.25}, {ModeIndex{{1, 0}, {-1}}, 0.25},
                                               {ModeIndex{{0, 1}, {1}}, cplx(0, -0.125)},
                                               {ModeIndex{{0, 1}, {-1}}, cplx(0, 0.125)}};
  const FourierField f = field_from_modes(g, 2, 1, TruncationBox{s.N.back(), 2});
  RunOptions o;
  o.iteration.stop_increment = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run(f, golden(), s, o));
}
BENCHMARK(BM_ReferenceRun)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
