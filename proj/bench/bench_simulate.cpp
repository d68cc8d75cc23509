// Simulation kernel throughput: CSR/OpenMP kernel against the dense serial
// reference, with and without plasticity.

#include "hrsnn/pipeline.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace hrsnn;

namespace {

struct Fixture {
    Network net;
    SpikeRaster input;
};

Fixture make_fixture(std::size_t n_neurons, std::size_t bins) {
    ModelConfig m;
    m.topology.n_exc = n_neurons * 4 / 5;
    m.topology.n_inh = n_neurons - m.topology.n_exc;
    m.topology.input_scale = 0.5;
    m.topology.input_fraction = 0.3;
    const std::size_t n_in = 50;
    Fixture f{instantiate_network(m, n_in, 1), SpikeRaster(n_in, bins, 1.0)};
    std::mt19937_64 rng(2);
    std::bernoulli_distribution spike(0.1);
    for (std::size_t t = 0; t < bins; ++t)
        for (std::size_t k = 0; k < n_in; ++k)
            if (spike(rng)) f.input.set(k, t);
    return f;
}

template <bool Reference>
void BM_Simulate(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const bool learning = state.range(1) != 0;
    const std::size_t bins = 2000;
    const auto f = make_fixture(n, bins);
    SimOptions opts;
    opts.learning = learning;
    for (auto _ : state) {
        auto trace = Reference ? simulate_reference(f.net, f.input, static_cast<double>(bins), opts)
                               : simulate(f.net, f.input, static_cast<double>(bins), opts);
        benchmark::DoNotOptimize(trace.raster);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * bins * n));
}

} // namespace

BENCHMARK(BM_Simulate<false>)->Name("kernel")->ArgsProduct({{200, 500, 1000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Simulate<true>)->Name("reference")->ArgsProduct({{200, 500, 1000}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
