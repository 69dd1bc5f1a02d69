// Block Thomas vs direct solves on the N-atom tower, and the Schur resolvent
// vs one monolithic sparse LU on the spin-boson model.

#include <benchmark/benchmark.h>

#include <random>

#include "sbren/multiatom.hpp"
#include "sbren/sbmodel.hpp"

using namespace sbren;

namespace {

constexpr Complex z{0.3, 0.7};

ModeGrid grid(std::size_t modes) {
    GridSpec s;
    s.k_min = 0.5;
    s.k_max = 2.5;
    s.count = modes;
    return build_grid(s);
}

MultiAtomParams atoms(std::size_t n, const ModeGrid& g) {
    MultiAtomParams p;
    for (std::size_t l = 0; l < n; ++l) {
        p.omega_e.push_back(1.0 + 0.1 * static_cast<double>(l));
        p.omega_g.push_back(0.0);
        p.f.push_back(make_form_factor({1.0, 0.5}, g));
    }
    p.lambda = 0.5;
    return p;
}

CVector probe(std::size_t n) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> d;
    CVector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = Complex{d(rng), d(rng)};
    return v;
}

// fixed Fock dimension D = 10 (M = 3, n_max = 2)
void BM_BlockThomas(benchmark::State& state) {
    const auto g = grid(3);
    const FockBasis b(3, 2);
    const MultiAtomModel m(atoms(static_cast<std::size_t>(state.range(0)), g), g, b);
    const CVector psi = probe(m.blocks().dimension());
    for (auto _ : state) benchmark::DoNotOptimize(block_tridiag_resolvent(z, m.blocks(), psi).x.data());
    state.counters["dim"] = static_cast<double>(psi.size());
}

void BM_SparseLU(benchmark::State& state) {
    const auto g = grid(3);
    const FockBasis b(3, 2);
    const auto h = assemble_multi(atoms(static_cast<std::size_t>(state.range(0)), g), g, b).matrix;
    const CVector psi = probe(static_cast<std::size_t>(h.rows()));
    for (auto _ : state) benchmark::DoNotOptimize(solve(h, z, psi).x.data());
    state.counters["dim"] = static_cast<double>(psi.size());
}

void BM_DenseLU(benchmark::State& state) {
    const auto g = grid(3);
    const FockBasis b(3, 2);
    CMatrix h = CMatrix(assemble_multi(atoms(static_cast<std::size_t>(state.range(0)), g), g, b).matrix);
    h.diagonal().array() -= z;
    const CVector psi = probe(static_cast<std::size_t>(h.rows()));
    for (auto _ : state) {
        CVector x = h.partialPivLu().solve(psi);
        benchmark::DoNotOptimize(x.data());
    }
    state.counters["dim"] = static_cast<double>(psi.size());
}

SpinBoson spin_boson(const ModeGrid& g, const FockBasis& b) {
    SpinBosonParams p;
    p.omega_e = 1.0;
    p.lambda = 0.5;
    p.f = make_form_factor({1.0, 0.5}, g);
    return SpinBoson(p, g, b);
}

void BM_SchurResolvent(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    const auto g = grid(m);
    const FockBasis b(m, 2);
    const auto model = spin_boson(g, b);
    const TwoBlockState psi = TwoBlockState::split(probe(2 * b.dimension()), b.dimension());
    for (auto _ : state) benchmark::DoNotOptimize(model.resolvent_apply(z, psi).excited.data());
    state.counters["dim"] = static_cast<double>(2 * b.dimension());
}

void BM_MonolithicLU(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    const auto g = grid(m);
    const FockBasis b(m, 2);
    const auto h = spin_boson(g, b).assemble().matrix;
    const CVector psi = probe(2 * b.dimension());
    for (auto _ : state) benchmark::DoNotOptimize(solve(h, z, psi).x.data());
    state.counters["dim"] = static_cast<double>(psi.size());
}

} // namespace

BENCHMARK(BM_BlockThomas)->DenseRange(2, 8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SparseLU)->DenseRange(2, 8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DenseLU)->DenseRange(2, 7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SchurResolvent)->RangeMultiplier(2)->Range(8, 64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonolithicLU)->RangeMultiplier(2)->Range(8, 64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
