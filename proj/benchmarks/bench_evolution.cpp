#include <memory>

#include <benchmark/benchmark.h>

#include "ionsim/experiments.hpp"

using namespace ionsim;

namespace {

SimParams params(int cutoff) {
  SimParams p;
  p.epsilon = 1.0;
  p.lambda2 = 0.1;
  p.nbar = 0.3 * cutoff;
  p.fock_cutoff = cutoff;
  return p;
}

PureState initial(const SimParams& p) {
  return prepare_initial(M_PI / 4, 0.0, coherent_amplitudes_for_cutoff(p.nbar, p.fock_cutoff));
}

void BM_PureBlock(benchmark::State& state) {
  const SimParams p = params(static_cast<int>(state.range(0)));
  const auto psi0 = initial(p);
  const auto times = linspace(0.0, 30.0, 101);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_pure(psi0, p, times));
}
BENCHMARK(BM_PureBlock)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_PureDense(benchmark::State& state) {
  const SimParams p = params(static_cast<int>(state.range(0)));
  const auto psi0 = initial(p);
  const auto times = linspace(0.0, 30.0, 101);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_pure_dense(psi0, p, times));
}
BENCHMARK(BM_PureDense)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_MilburnBlockIons(benchmark::State& state) {
  const SimParams p = params(static_cast<int>(state.range(0)));
  const auto sys = std::make_shared<const BlockSystem>(p);
  const BlockMilburnEvolver ev(sys, initial(p), 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(ev.ion_state(7.5));
}
BENCHMARK(BM_MilburnBlockIons)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);

void BM_MilburnDense(benchmark::State& state) {
  const SimParams p = params(static_cast<int>(state.range(0)));
  const CMatrix h = build_full_hamiltonian(p);
  const auto rho0 = DensityMatrix::from_pure(initial(p));
  for (auto _ : state) benchmark::DoNotOptimize(milburn_closed_form(rho0, h, 0.05, 7.5));
}
BENCHMARK(BM_MilburnDense)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_ThetaSweep(benchmark::State& state) {
  SimParams p;
  p.nbar = 5.0;
  p.fock_cutoff = coherent_amplitudes(5.0, 1e-10).cutoff;
  const auto thetas = linspace(0.0, M_PI, 31);
  const auto times = linspace(0.0, 30.0, 201);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_theta_sweep(p, Measure::i_concurrence, default_cut(Measure::i_concurrence),
                                             thetas, times, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_ThetaSweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
