// bench.cpp - microbenchmarks for the hot kernels

#include "bathkit/bathkit.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace bathkit;

namespace {

NoiseKernel surrogate_300k() { return NoiseKernel(surrogate_spectral_density(), Temperature::kelvin(300.0)); }

void bm_assemble_fdr(benchmark::State& state) {
    const NoiseKernel nk = surrogate_300k();
    const FdrGrid grid(1000.0, 500.0, state.range(0), 10 * state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(assemble_fdr(nk, grid));
}
BENCHMARK(bm_assemble_fdr)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void bm_column_id(benchmark::State& state) {
    const FdrMatrix f = assemble_fdr(surrogate_300k(), FdrGrid(1000.0, 500.0, state.range(0), 10 * state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(column_id(f.realified, {1e-2, std::nullopt}));
}
BENCHMARK(bm_column_id)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void bm_nnls(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> d;
    const Eigen::Index n = state.range(0);
    RealMatrix a(2000, n);
    RealVector b(2000);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = d(rng);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = d(rng);
    for (auto _ : state) benchmark::DoNotOptimize(nnls(a, b));
}
BENCHMARK(bm_nnls)->Arg(16)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

DiscreteModel qubit_with_modes(int m) {
    SystemSpec s;
    s.h_s = ComplexMatrix::Zero(2, 2);
    s.h_s(0, 0) = 50.0;
    s.h_s(1, 1) = -50.0;
    s.h_s(0, 1) = s.h_s(1, 0) = 20.0;
    ComplexMatrix v = ComplexMatrix::Zero(2, 2);
    v(0, 0) = 1.0;
    v(1, 1) = -1.0;
    s.couplings = {{"env", v}};
    BathModel b;
    for (int k = 0; k < m; ++k) b.modes.push_back({-200.0 + 400.0 * k / std::max(1, m - 1), 1.0, 20.0});
    return build_model(s, {{"env", b}});
}

void bm_fock_apply(benchmark::State& state) {
    const DiscreteModel model = qubit_with_modes(static_cast<int>(state.range(0)));
    const FockHamiltonian h(model, FockTruncation::uniform(model, 4));
    ComplexVector in = ComplexVector::Ones(h.dimension()), out(h.dimension());
    for (auto _ : state) {
        h.apply(in, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.counters["dim"] = static_cast<double>(h.dimension());
}
BENCHMARK(bm_fock_apply)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void bm_lanczos_step(benchmark::State& state) {
    const DiscreteModel model = qubit_with_modes(static_cast<int>(state.range(0)));
    const FockHamiltonian h(model, FockTruncation::uniform(model, 4));
    ComplexVector psi = ComplexVector::Zero(h.dimension());
    psi(0) = 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(lanczos_step(h, psi, 1.0, 30));
}
BENCHMARK(bm_lanczos_step)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
