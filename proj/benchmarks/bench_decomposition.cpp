#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ocdmd/decomposition.hpp"
#include "ocdmd/occupation.hpp"
#include "ocdmd/trajectory.hpp"

namespace {

// Oscillator data cut into 40-sample segments, as in the desk-scale runs.
std::vector<ocdmd::Trajectory> oscillator_segments(int count) {
  Eigen::MatrixXd A(2, 2);
  A << 0.0, 1.0, -1.0, 0.0;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<ocdmd::Trajectory> trajs;
  for (int k = 0; k < count; ++k) {
    const Eigen::Vector2d x0(u(rng), u(rng));
    const auto t = ocdmd::simulate(ocdmd::LinearSystem{A}, x0, 1.0, 0.005);
    auto pieces = ocdmd::segment(t, 40);
    trajs.insert(trajs.end(), pieces.begin(), pieces.end());
  }
  return trajs;
}

void BM_GramMatrix(benchmark::State& state) {
  const auto trajs = oscillator_segments(static_cast<int>(state.range(0)));
  const auto w = ocdmd::trajectory_weights(trajs);
  const auto kernel = ocdmd::KernelSpec::gaussian(5.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ocdmd::gram_matrix(trajs, w, kernel));
  }
  state.counters["M"] = static_cast<double>(trajs.size());
}
BENCHMARK(BM_GramMatrix)->Arg(2)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_InteractionMatrix(benchmark::State& state) {
  const auto trajs = oscillator_segments(static_cast<int>(state.range(0)));
  const auto w = ocdmd::trajectory_weights(trajs);
  const auto kernel = ocdmd::KernelSpec::gaussian(5.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ocdmd::interaction_matrix(trajs, w, kernel, 0.99));
  }
}
BENCHMARK(BM_InteractionMatrix)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_Eigendecompose(benchmark::State& state) {
  const auto trajs = oscillator_segments(static_cast<int>(state.range(0)));
  const auto data = ocdmd::assemble(trajs, ocdmd::KernelSpec::gaussian(5.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ocdmd::eigendecompose(data.G, data.I_a, ocdmd::kDefaultEps));
  }
  state.counters["M"] = static_cast<double>(trajs.size());
}
BENCHMARK(BM_Eigendecompose)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
