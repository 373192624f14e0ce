#include "entbase/channels.hpp"
#include "entbase/imaging.hpp"
#include "entbase/protocol.hpp"
#include "entbase/qcore.hpp"

#include <benchmark/benchmark.h>

using namespace entbase;

static void BM_ApplyIndependentChannels(benchmark::State& state) {
  const DensityMatrix4 bell = make_bell_psi(0.0);
  const KrausChannel left = kraus_depolarizing(0.3), right = kraus_amplitude_damping(0.4);
  for (auto _ : state) benchmark::DoNotOptimize(apply_independent_channels(bell, left, right));
}
BENCHMARK(BM_ApplyIndependentChannels);

static void BM_ClosedFormResource(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(xstate_depolarizing(0.3, 0.4));
}
BENCHMARK(BM_ClosedFormResource);

static void BM_ProjectorOracle(benchmark::State& state) {
  const DensityMatrix4 rho_A = make_astro_state(AstroVisibility(0.6, 1.1));
  const DensityMatrix4 rho_X = to_density_matrix(xstate_amplitude_damping(0.3, 0.6));
  for (auto _ : state) benchmark::DoNotOptimize(raw_probabilities_oracle(rho_A, rho_X));
}
BENCHMARK(BM_ProjectorOracle);

static void BM_RunObservation(benchmark::State& state) {
  const XState x = xstate_dephasing(0.2, 0.2);
  const AstroVisibility v(0.6, 1.0);
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(run_observation(v, x, PhaseSettings::quadrature(), state.range(0), ++seed));
}
BENCHMARK(BM_RunObservation)->Arg(1000)->Arg(1000000);

static void BM_ReconstructIntensity(benchmark::State& state) {
  const SkyModel sky = SkyModel::two_point(0.01, 1.0);
  const BaselinePlan plan = BaselinePlan::linear(200.0, state.range(0));
  std::vector<VisibilitySample> samples;
  for (double B : plan.baselines()) samples.push_back({B, true_visibility(sky, B)});
  const auto grid = uniform_grid(-0.02, 0.02, 201);
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct_intensity(samples, grid, 1.0));
}
BENCHMARK(BM_ReconstructIntensity)->Arg(64)->Arg(1024);

BENCHMARK_MAIN();
