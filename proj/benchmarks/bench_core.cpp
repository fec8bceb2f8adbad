#include <benchmark/benchmark.h>

#include "qaec/analytic.hpp"
#include "qaec/channel.hpp"
#include "qaec/linalg.hpp"
#include "qaec/qae.hpp"
#include "qaec/rng.hpp"
#include "qaec/sources.hpp"
#include "qaec/train.hpp"

using namespace qaec;

namespace {

void bm_tensor(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(1);
  CMatrix a = random_unitary(d, rng), b = random_unitary(d, rng);
  for (auto _ : state) benchmark::DoNotOptimize(tensor(a, b));
}
BENCHMARK(bm_tensor)->Arg(4)->Arg(8)->Arg(16);

void bm_channel_apply(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(2);
  KrausChannel ch = random_channel(d, d, 4, rng);
  CVector psi = rng.unit_vector(d);
  CMatrix rho = proj(psi);
  for (auto _ : state) benchmark::DoNotOptimize(ch.apply(rho));
}
BENCHMARK(bm_channel_apply)->Arg(4)->Arg(16)->Arg(64);

void bm_choi_round_trip(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(3);
  KrausChannel ch = random_channel(d, d, 3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(choi_to_kraus(to_choi(ch)));
}
BENCHMARK(bm_choi_round_trip)->Arg(2)->Arg(4)->Arg(8);

void bm_link_product(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(4);
  ChoiMatrix a = to_choi(random_channel(d, d, 2, rng));
  ChoiMatrix b = to_choi(random_channel(d, d, 2, rng));
  for (auto _ : state) benchmark::DoNotOptimize(link_product(b, a));
}
BENCHMARK(bm_link_product)->Arg(2)->Arg(4)->Arg(8);

void bm_exact_mu1(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(5);
  KrausChannel enc = random_channel(d, d / 2, 2, rng);
  KrausChannel dec = random_channel(d / 2, d, 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(exact_mu1_fidelity(enc, dec, 0.1));
}
BENCHMARK(bm_exact_mu1)->Arg(4)->Arg(8)->Arg(16);

void bm_gradient_step(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  QaeArchitecture arch{n, 1, 1, n};
  TrainConfig cfg;
  cfg.seed = 6;
  cfg.init_scale = 0.1;
  QaeParams p = init_params(arch, cfg);
  std::vector<CVector> batch = sample(mu1_source(1 << n, 0.1, 7), 64);
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_gradient(p, batch));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(bm_gradient_step)->Arg(2)->Arg(3)->Arg(4);

void bm_five_point(benchmark::State& state) {
  auto [enc, dec] = phase_family_achiever();
  for (auto _ : state) benchmark::DoNotOptimize(five_point_phase_fidelity(enc, dec));
}
BENCHMARK(bm_five_point);

}  // namespace

BENCHMARK_MAIN();
