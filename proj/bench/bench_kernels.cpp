// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include "hclab/bp.hpp"
#include "hclab/population.hpp"

using namespace hclab;

namespace {

const ModelParams& graph_params()
{
    static const ModelParams p = params_from_snr(0.005, 100.0, 0.5, std::size_t{100000});
    return p;
}

const PlantedGraph& bench_graph()
{
    static const PlantedGraph g = sample_graph(graph_params(), 1);
    return g;
}

template <void (*Step)(MessageState&)>
void bp_bench(benchmark::State& state)
{
    MessageState s = bp_init(bench_graph(), graph_params(), InitMode::free);
    for (auto _ : state) {
        Step(s);
        benchmark::DoNotOptimize(s.fields.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.messages.size()));
}

template <void (*Step)(Population&, const ModelParams&, std::uint64_t, const PopulationOptions&)>
void pd_bench(benchmark::State& state)
{
    const ModelParams p = params_from_snr(0.005, 100.0, 0.5);
    const auto M = static_cast<std::size_t>(state.range(0));
    Population pop = pd_init(p, M, InitMode::free, 1);
    for (auto _ : state) {
        Step(pop, p, 1, {});
        benchmark::DoNotOptimize(pop.xi0.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * M));
}

}  // namespace

BENCHMARK(bp_bench<bp_step>)->Name("bp_step/n=1e5")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(bp_bench<bp_step_reference>)->Name("bp_step_reference/n=1e5")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(pd_bench<pd_step>)->Name("pd_step")->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(pd_bench<pd_step_reference>)
    ->Name("pd_step_reference")
    ->Arg(10000)
    ->Arg(100000)
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
