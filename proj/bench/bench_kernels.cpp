#include <benchmark/benchmark.h>

#include <random>

#include "roughflow/field_zoo.hpp"
#include "roughflow/kernels.hpp"

using namespace roughflow;

namespace {

struct Setup {
    PeriodicGrid grid;
    std::vector<std::vector<double>> b;
    std::vector<double> points;
    std::vector<Complex> src, dst;

    explicit Setup(int N) : grid(2, N) {
        const auto field = sample_field(VectorFieldSpec::singular_vortex(1.5), grid);
        for (const auto& c : field.components()) b.push_back(c.real_part());
        points.resize(grid.node_count() * 2);
        kernels::trace_serial(grid, b, grid.spacing() / 4, 2, Interp::cubic, points);
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        src.resize(grid.node_count());
        for (auto& z : src) z = Complex(u(rng), u(rng));
        dst.resize(grid.node_count());
    }
};

template <bool Parallel>
void BM_trace(benchmark::State& state) {
    Setup s(static_cast<int>(state.range(0)));
    const auto kind = static_cast<Interp>(state.range(1));
    std::vector<double> out(s.points.size());
    for (auto _ : state) {
        if constexpr (Parallel)
            kernels::trace_parallel(s.grid, s.b, s.grid.spacing() / 4, 2, kind, out);
        else
            kernels::trace_serial(s.grid, s.b, s.grid.spacing() / 4, 2, kind, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.grid.node_count()));
}

template <bool Parallel>
void BM_remap(benchmark::State& state) {
    Setup s(static_cast<int>(state.range(0)));
    const auto kind = static_cast<Interp>(state.range(1));
    for (auto _ : state) {
        if constexpr (Parallel)
            kernels::remap_parallel(s.grid, s.src, s.points, kind, s.dst);
        else
            kernels::remap_serial(s.grid, s.src, s.points, kind, s.dst);
        benchmark::DoNotOptimize(s.dst.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.grid.node_count()));
}

void sizes(benchmark::internal::Benchmark* b) {
    for (int n : {128, 256, 512})
        for (Interp k : {Interp::linear, Interp::cubic}) b->Args({n, static_cast<int>(k)});
    b->ArgNames({"N", "cubic"})->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_trace<false>)->Name("trace/serial")->Apply(sizes);
BENCHMARK(BM_trace<true>)->Name("trace/parallel")->Apply(sizes);
BENCHMARK(BM_remap<false>)->Name("remap/serial")->Apply(sizes);
BENCHMARK(BM_remap<true>)->Name("remap/parallel")->Apply(sizes);

BENCHMARK_MAIN();
