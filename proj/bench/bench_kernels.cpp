// OpenMP kernels against their serial references.

#include "gcs/channel.hpp"
#include "gcs/cpe.hpp"
#include "gcs/demapper.hpp"

#include <benchmark/benchmark.h>

namespace {

gcs::SymbolBlock received_block(std::size_t k) {
  const gcs::Constellation c = gcs::square_qam(6);
  gcs::Rng rng(11);
  std::uniform_int_distribution<std::size_t> pick(0, c.size() - 1);
  gcs::SymbolBlock x(k);
  for (auto& v : x) v = c.point(pick(rng));
  const gcs::ChannelParams ch = gcs::params_from(17.0, 100e3);
  const gcs::SymbolBlock y = gcs::awgn(x, ch.sigma_n, rng);
  return gcs::wiener_phase(y, ch.sigma_phi, rng, 0.2).symbols;
}

void BM_BpsHard(benchmark::State& state) {
  const auto z = received_block(static_cast<std::size_t>(state.range(0)));
  const gcs::Constellation c = gcs::square_qam(6);
  for (auto _ : state) benchmark::DoNotOptimize(gcs::bps_hard(z, c, gcs::BpsConfig{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BpsHardReference(benchmark::State& state) {
  const auto z = received_block(static_cast<std::size_t>(state.range(0)));
  const gcs::Constellation c = gcs::square_qam(6);
  for (auto _ : state) benchmark::DoNotOptimize(gcs::bps_hard_reference(z, c, gcs::BpsConfig{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LogMap(benchmark::State& state) {
  const auto y = received_block(static_cast<std::size_t>(state.range(0)));
  const gcs::Constellation c = gcs::square_qam(6);
  std::vector<double> out(y.size() * 6);
  for (auto _ : state) {
    gcs::logmap_llr_batch(y, c, 0.02, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LogMapReference(benchmark::State& state) {
  const auto y = received_block(static_cast<std::size_t>(state.range(0)));
  const gcs::Constellation c = gcs::square_qam(6);
  std::vector<double> out(y.size() * 6);
  for (auto _ : state) {
    gcs::logmap_llr_batch_reference(y, c, 0.02, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_BpsHard)->Arg(1 << 14);
BENCHMARK(BM_BpsHardReference)->Arg(1 << 14);
BENCHMARK(BM_LogMap)->Arg(1 << 14);
BENCHMARK(BM_LogMapReference)->Arg(1 << 14);

BENCHMARK_MAIN();
