#include <benchmark/benchmark.h>

#include "sve/mesh.hpp"
#include "sve/noise.hpp"
#include "sve/problem.hpp"
#include "sve/schemes.hpp"
#include "sve/soe.hpp"

#include <cmath>
#include <cstdint>

namespace {

const sve::SVEProblem& bench_problem() {
    static const sve::SVEProblem prob = sve::make_example_problem(0.9, 0.1);
    return prob;
}

void BM_sample_path(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const sve::GradedMesh mesh = sve::build_mesh(1.0, n, 2.0);
    std::uint64_t seed = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(sve::sample_path(mesh, 1, seed++));
    state.SetComplexityN(static_cast<std::int64_t>(n));
}
BENCHMARK(BM_sample_path)->RangeMultiplier(4)->Range(256, 4096)->Complexity();

void BM_kernel_weights(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const sve::GradedMesh mesh = sve::build_mesh(1.0, n, 2.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(sve::build_kernel_weights(mesh, 0.9, 0.1));
    state.SetComplexityN(static_cast<std::int64_t>(n));
}
BENCHMARK(BM_kernel_weights)->RangeMultiplier(2)->Range(128, 1024)->Complexity();

void BM_em_solve(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const sve::GradedMesh mesh = sve::build_mesh(1.0, n, 2.0);
    const sve::KernelWeights weights = sve::build_kernel_weights(mesh, 0.9, 0.1);
    const sve::BrownianPath noise = sve::sample_path(mesh, 1, 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(sve::em_solve(bench_problem(), mesh, noise, weights));
    state.SetComplexityN(static_cast<std::int64_t>(n));
}
BENCHMARK(BM_em_solve)
    ->RangeMultiplier(2)
    ->Range(128, 1024)
    ->Unit(benchmark::kMillisecond)
    ->Complexity();

void BM_fast_em_solve(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const sve::GradedMesh mesh = sve::build_mesh(1.0, n, 2.0);
    const double eps = 1e-6;
    const sve::SOEApprox ka = sve::build_soe(0.9, mesh.step(1), 1.0, eps);
    const sve::SOEApprox kb = sve::build_soe(0.1, mesh.step(1), 1.0, eps);
    const sve::BrownianPath noise = sve::sample_path(mesh, 1, 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            sve::fast_em_solve(bench_problem(), mesh, noise, eps, &ka, &kb));
    state.SetComplexityN(static_cast<std::int64_t>(n));
}
BENCHMARK(BM_fast_em_solve)
    ->RangeMultiplier(2)
    ->Range(128, 4096)
    ->Unit(benchmark::kMillisecond)
    ->Complexity();

void BM_milstein_solve(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const sve::SVEProblem prob = sve::make_example_problem(0.9, 0.0);
    const sve::GradedMesh mesh = sve::build_mesh(1.0, n, 2.0);
    const sve::KernelWeights weights = sve::build_kernel_weights(mesh, 0.9, 0.0);
    const sve::BrownianPath noise = sve::sample_path(mesh, 1, 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(sve::milstein_solve(
            prob, mesh, noise, sve::MilsteinMode::exact_beta0, nullptr, weights));
    state.SetComplexityN(static_cast<std::int64_t>(n));
}
BENCHMARK(BM_milstein_solve)
    ->RangeMultiplier(2)
    ->Range(128, 1024)
    ->Unit(benchmark::kMillisecond)
    ->Complexity();

void BM_build_soe(benchmark::State& state) {
    const double eps = std::pow(10.0, -static_cast<double>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(sve::build_soe(0.9, 1e-4, 1.0, eps));
}
BENCHMARK(BM_build_soe)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
