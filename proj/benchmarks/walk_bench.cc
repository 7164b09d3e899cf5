#include <benchmark/benchmark.h>

#include "qwalk/measures.h"

namespace {

using namespace qwalk;

DensityState line_density(int steps) {
    const WalkSpec spec = WalkSpec::standard(build_line(steps));
    const PureState psi = spec.initial_state();
    return DensityState::from_pure(psi);
}

void BM_DensityCoin(benchmark::State &state) {
    DensityState rho = line_density(static_cast<int>(state.range(0)));
    const CoinOp h = hadamard();
    for (auto _ : state) {
        apply_coin(rho, h);
        benchmark::DoNotOptimize(rho.data().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rho.data().size()));
}
BENCHMARK(BM_DensityCoin)->Arg(50)->Arg(100)->Arg(200);

void BM_DensityShift(benchmark::State &state) {
    const Graph g = build_line(static_cast<int>(state.range(0)));
    DensityState rho = line_density(static_cast<int>(state.range(0)));
    std::vector<cplx> scratch;
    for (auto _ : state) {
        apply_shift(rho, g, scratch);
        benchmark::DoNotOptimize(rho.data().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rho.data().size()));
}
BENCHMARK(BM_DensityShift)->Arg(50)->Arg(100)->Arg(200);

void BM_DensityChannel(benchmark::State &state) {
    DensityState rho = line_density(100);
    const NoiseSpec noise = NoiseSpec::dephasing(static_cast<NoiseModel>(state.range(0)), 0.01);
    for (auto _ : state) {
        apply_channel(rho, noise);
        benchmark::DoNotOptimize(rho.data().data());
    }
    state.SetLabel(std::string(noise_model_name(noise.model)));
}
BENCHMARK(BM_DensityChannel)
    ->Arg(static_cast<int>(NoiseModel::coin_dephase))
    ->Arg(static_cast<int>(NoiseModel::particle_dephase))
    ->Arg(static_cast<int>(NoiseModel::full_dephase));

void BM_DensityStepHypercube(benchmark::State &state) {
    const WalkSpec spec = WalkSpec::standard(build_hypercube(static_cast<int>(state.range(0))));
    DensityStepper stepper(spec, NoiseSpec::dephasing(NoiseModel::full_dephase, 0.05));
    for (auto _ : state) {
        benchmark::DoNotOptimize(stepper.step());
    }
}
BENCHMARK(BM_DensityStepHypercube)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_PureRun(benchmark::State &state) {
    const int steps = static_cast<int>(state.range(0));
    const WalkSpec spec = WalkSpec::standard(build_line(steps));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_pure(spec, steps));
    }
}
BENCHMARK(BM_PureRun)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Trajectories(benchmark::State &state) {
    const WalkSpec spec = WalkSpec::standard(build_line(50));
    const NoiseSpec noise = NoiseSpec::dephasing(NoiseModel::full_dephase, 0.1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_trajectories(spec, noise, 50, static_cast<std::size_t>(state.range(0)), 1));
    }
}
BENCHMARK(BM_Trajectories)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
