#include <random>

#include <benchmark/benchmark.h>

#include "modval/modval.hpp"

using namespace modval;

namespace {

HermitianObservable make_observable(std::size_t dim) {
    std::mt19937_64 rng(dim);
    std::normal_distribution<double> n(0.0, 1.0);
    const auto d = static_cast<Eigen::Index>(dim);
    CMatrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = Complex(n(rng), n(rng));
    }
    return HermitianObservable(CMatrix(0.5 * (m + m.adjoint())));
}

StateVector make_state(std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    CVector v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(n(rng), n(rng));
    return StateVector(v).normalized();
}

void BM_Evolve(benchmark::State& state) {
    const auto dim = static_cast<std::size_t>(state.range(0));
    const auto a = make_observable(dim);
    const auto psi = make_state(dim, 1);
    double g = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(evolve(a, g, psi));
        g += 1e-9;
    }
}
BENCHMARK(BM_Evolve)->Arg(2)->Arg(4)->Arg(8);

void BM_ModularValue(benchmark::State& state) {
    const auto dim = static_cast<std::size_t>(state.range(0));
    const auto a = make_observable(dim);
    const PrePostSelection sel(make_state(dim, 2), make_state(dim, 3));
    for (auto _ : state) benchmark::DoNotOptimize(modular_value(a, 0.7, sel));
}
BENCHMARK(BM_ModularValue)->Arg(2)->Arg(4)->Arg(8);

void BM_GeneralizedValue(benchmark::State& state) {
    const auto dim = static_cast<std::size_t>(state.range(0));
    const auto a = make_observable(dim);
    const PrePostSelection sel(make_state(dim, 2), make_state(dim, 3));
    const auto f = FunctionSpec::modular(0.7);
    for (auto _ : state) benchmark::DoNotOptimize(generalized_value(f, a, sel));
}
BENCHMARK(BM_GeneralizedValue)->Arg(2)->Arg(4)->Arg(8);

void BM_SampleExperiment(benchmark::State& state) {
    StokesExampleConfig cfg;
    const auto pointer = stokes_pointer(cfg);
    const auto sel = stokes_states(cfg);
    const auto s = stokes_operator();
    const auto trials = static_cast<std::uint64_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sample_experiment(pointer, s, 0.1 * kPi, sel, trials, ++seed));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(trials));
}
BENCHMARK(BM_SampleExperiment)->Arg(10000)->Arg(1000000);

void BM_Calibrate(benchmark::State& state) {
    StokesExampleConfig cfg;
    cfg.varphi = -0.3 * kPi;
    const SimulatedDevice device(cfg, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(calibrate_coupling(device, cfg.varphi));
}
BENCHMARK(BM_Calibrate);

}  // namespace

BENCHMARK_MAIN();
