#include <benchmark/benchmark.h>

#include "catport/loss.hpp"
#include "catport/protocol.hpp"

using namespace catport;

namespace {

void BM_Displacement(benchmark::State& state) {
  const int n_max = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(displacement(cplx(2.0, 2.0), n_max));
}
BENCHMARK(BM_Displacement)->Arg(60)->Arg(120)->Arg(240);

void BM_DenseBeamSplitter(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto s = DenseState::product(coherent_vector(1.2, n), cat_vector(1.2, 0, n), FockVector::basis(0, n));
  for (auto _ : state) benchmark::DoNotOptimize(apply_bs_dense(s, {Mode::B, Mode::C}, BsConvention::Standard));
}
BENCHMARK(BM_DenseBeamSplitter)->Arg(30)->Arg(40)->Arg(50);

void BM_TeleportBranch(benchmark::State& state) {
  ProtocolConfig cfg;
  cfg.k_plus = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(teleport(cfg).fidelity);
}
BENCHMARK(BM_TeleportBranch)->Arg(1)->Arg(1000);

void BM_TeleportDense(benchmark::State& state) {
  ProtocolConfig cfg;
  cfg.alpha = 1.2;
  cfg.beta = cplx(0.0, 1.2);
  cfg.engine = Engine::Dense;
  for (auto _ : state) benchmark::DoNotOptimize(teleport(cfg).fidelity);
}
BENCHMARK(BM_TeleportDense)->Unit(benchmark::kMillisecond);

void BM_LossyFidelity(benchmark::State& state) {
  ProtocolConfig cfg;
  const auto o = default_outcomes(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(lossy_fidelity(cfg, 0.7, o).fidelity);
}
BENCHMARK(BM_LossyFidelity)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
