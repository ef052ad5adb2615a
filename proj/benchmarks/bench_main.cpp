#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "bnk/collision_operator.hpp"
#include "bnk/solver.hpp"

using namespace bnk;

namespace {

DistributionField maxwellian(const VelocityGrid& v, int nx) {
    DistributionField f(TorusGrid(nx), v);
    for (std::size_t x = 0; x < f.torus().size(); ++x)
        for (std::size_t c = 0; c < v.size(); ++c) f.at(x, c) = 0.5 * std::exp(-norm2(v.velocity(c)) / 0.5);
    return f;
}

void BM_collision_terms(benchmark::State& state) {
    const VelocityGrid v(2.0, static_cast<int>(state.range(0)));
    const CollisionOperator op(v, KernelSpec{}, build_sphere_quadrature(static_cast<int>(state.range(1))),
                               Regularization::regularized(0.5));
    const DistributionField f = maxwellian(v, 1);
    for (auto _ : state) benchmark::DoNotOptimize(op.terms(f));
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(v.size()));
}
BENCHMARK(BM_collision_terms)->Args({8, 3})->Args({12, 3})->Args({16, 3})->Args({16, 4})->Unit(benchmark::kMillisecond);

void BM_transport_shift(benchmark::State& state) {
    const VelocityGrid v(2.0, 8);
    const int nx = static_cast<int>(state.range(0));
    DistributionField f(TorusGrid(nx), v);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double& x : f.values()) x = u(rng);
    for (auto _ : state) benchmark::DoNotOptimize(transport_shift(f, 0.013));
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(f.size()));
}
BENCHMARK(BM_transport_shift)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_conservative_projection(benchmark::State& state) {
    const VelocityGrid v(2.0, static_cast<int>(state.range(0)));
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    CollisionIncrement inc{TorusGrid(4), v, std::vector<double>(TorusGrid(4).size() * v.size())};
    for (double& x : inc.values) x = g(rng);
    for (auto _ : state) benchmark::DoNotOptimize(conservative_projection(inc, v));
}
BENCHMARK(BM_conservative_projection)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_picard_step(benchmark::State& state) {
    const VelocityGrid v(2.0, static_cast<int>(state.range(0)));
    SolverConfig cfg;
    cfg.alpha = 0.5;
    const Solver s(cfg, v);
    const DistributionField f = maxwellian(v, 1);
    for (auto _ : state) {
        RunState st;
        st.field = f;
        benchmark::DoNotOptimize(s.picard_advance(st, 1e-3));
    }
}
BENCHMARK(BM_picard_step)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
