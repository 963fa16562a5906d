#include <benchmark/benchmark.h>

#include "sgm/bp.hpp"
#include "sgm/curie_weiss.hpp"
#include "sgm/graph.hpp"
#include "sgm/potentials.hpp"
#include "sgm/tree_cavity.hpp"
#include "sgm/xorsat.hpp"

using namespace sgm;

static void BM_ConfigurationModel(benchmark::State& state) {
    DegreeDistribution P = DegreeDistribution::delta(3);
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            sample_configuration_model(P, static_cast<int>(state.range(0)), seed++));
}
BENCHMARK(BM_ConfigurationModel)->Range(1 << 10, 1 << 16);

static void BM_IsingCavity(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    MultiGraph g = sample_configuration_model(DegreeDistribution::delta(3), n, 7);
    std::vector<double> B(n, 0.1), J(g.edges.size(), 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(ising_cavity_fixed_point(g, 0.4, B, J));
}
BENCHMARK(BM_IsingCavity)->Range(1 << 8, 1 << 12);

static void BM_BpSweep(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    MultiGraph g = sample_configuration_model(DegreeDistribution::delta(3), n, 7);
    Specification s = Specification::coloring(g, 4);
    MessageSet nu = MessageSet::uniform(g, 4);
    for (auto _ : state) benchmark::DoNotOptimize(bp_update(nu, g, s));
}
BENCHMARK(BM_BpSweep)->Range(1 << 8, 1 << 14);

static void BM_CwPmf(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(
            magnetization_pmf(static_cast<int>(state.range(0)), 2.0, 0.1));
}
BENCHMARK(BM_CwPmf)->Range(1 << 8, 1 << 16);

static void BM_PeelCore(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    FactorGraph fg = sample_factor_ensemble(FactorEnsembleKind::poisson_l(3), n, n, 5);
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(peel_core(fg, seed++));
}
BENCHMARK(BM_PeelCore)->Range(1 << 10, 1 << 16);

static void BM_MeanOde(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(mean_ode_solve(3, 1.1, 1e-3));
}
BENCHMARK(BM_MeanOde);

static void BM_DensityEvolution(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(density_evolution_ising(
            DegreeDistribution::delta(2), 1.0, 0.1,
            static_cast<int>(state.range(0)), 10, 3));
}
BENCHMARK(BM_DensityEvolution)->Range(1 << 10, 1 << 14);

BENCHMARK_MAIN();
