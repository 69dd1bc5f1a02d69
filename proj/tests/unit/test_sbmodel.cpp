#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "sbren/sbmodel.hpp"

using namespace sbren;

namespace {

struct Setup {
    ModeGrid grid;
    FockBasis basis;
    SpinBosonParams params;
};

Setup make(std::size_t m, std::size_t n_max, double lambda, double omega_e = 1.3) {
    GridSpec s;
    s.k_min = 1.0;
    s.k_max = 2.0;
    s.count = m;
    auto g = build_grid(s);
    SpinBosonParams p;
    p.omega_e = omega_e;
    p.lambda = lambda;
    p.f = make_form_factor({0.8, 0.5}, g);
    p.f.values[0] *= Complex{0.6, 0.8}; // a complex entry
    return {g, FockBasis(m, n_max), p};
}

TwoBlockState random_state(std::size_t d, std::mt19937_64& rng) {
    return {oracle::random_vector(d, rng), oracle::random_vector(d, rng)};
}

} // namespace

TEST(SpinBoson, DecoupledSpectrum) {
    auto s = make(3, 2, 0.0);
    const auto h = assemble_regular(s.params, s.grid, s.basis);
    EXPECT_EQ(h.block_offsets, (std::vector<std::size_t>{0, 10, 20}));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(oracle::dense(h.matrix));
    auto e = free_energies(s.grid, s.basis);
    std::vector<double> expected;
    for (double x : e) {
        expected.push_back(x + s.params.omega_e);
        expected.push_back(x);
    }
    std::sort(expected.begin(), expected.end());
    for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_NEAR(es.eigenvalues()[k], expected[k], 1e-13);
}

TEST(SpinBoson, JaynesCummingsClosure) {
    const ModeGrid g({1.0}, {0.7}, {1.1});
    SpinBosonParams p;
    p.omega_e = 0.9;
    p.lambda = 0.35;
    p.f = {{Complex{1.2, -0.4}}, "jc"};
    const FockBasis b(1, 1);
    const SpinBoson sb(p, g, b);
    const CMatrix h = oracle::dense(sb.assemble().matrix);
    ASSERT_EQ(h.rows(), 4);
    // (excited, vacuum) couples to (ground, one boson)
    const Complex coupling = p.lambda * std::sqrt(0.7) * std::conj(p.f.values[0]);
    EXPECT_NEAR(std::abs(h(0, 3) - coupling), 0.0, 1e-15);
    EXPECT_EQ(h(0, 0), Complex(0.9));
    EXPECT_EQ(h(3, 3), Complex(1.1));
    const auto [lo, hi] = oracle::jc_pair(0.9, 1.1, coupling);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + 4);
    // remaining levels: ground vacuum 0, excited one boson 2.0
    std::vector<double> expected{0.0, lo, hi, 2.0};
    std::sort(expected.begin(), expected.end());
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(ev[k], expected[k], 1e-13);
    auto lz = lowest_eigenpairs(sb.assemble().matrix, 2);
    EXPECT_NEAR(lz.values[1], expected[1], 1e-10);
}

TEST(SpinBoson, HermitianAndExcitationConserving) {
    auto s = make(4, 3, 0.7);
    const auto h = assemble_regular(s.params, s.grid, s.basis);
    EXPECT_EQ(max_hermiticity_defect(h.matrix), 0.0);
    const auto d = s.basis.dimension();
    for (Eigen::Index k = 0; k < h.matrix.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(h.matrix, k); it; ++it) {
            auto number = [&](Eigen::Index idx) {
                const bool excited = static_cast<std::size_t>(idx) < d;
                return (excited ? 1u : 0u) + s.basis.sector_of(static_cast<std::size_t>(idx) % d);
            };
            EXPECT_EQ(number(it.row()), number(it.col()));
        }
}

TEST(SpinBoson, Psi0Statistics) {
    auto s = make(6, 2, 0.45);
    const auto st = psi0_energy_stats(s.params, s.grid, s.basis);
    EXPECT_EQ(st.mean, s.params.omega_e);
    const double nf = scale_norm(s.params.f, 0.0, s.grid);
    EXPECT_NEAR(st.variance, s.params.lambda * s.params.lambda * nf * nf, 1e-14);
    s.params.lambda = 0.0;
    EXPECT_EQ(psi0_energy_stats(s.params, s.grid, s.basis).variance, 0.0);
}

TEST(SpinBoson, SigmaVacuumElement) {
    for (std::size_t m : {25, 100, 400}) {
        GridSpec gs;
        gs.count = m;
        const auto g = build_grid(gs);
        SpinBosonParams p;
        p.lambda = 1.0;
        p.f = make_form_factor({1.0, 0.0}, g);
        const FockBasis b(m, 1);
        const SpinBoson sb(p, g, b);
        const Complex v = oracle::dense(sb.sigma(-1.0))(0, 0);
        EXPECT_NEAR(v.real(), std::log(1.5), 2.0 / (m * m));
        EXPECT_EQ(v.imag(), 0.0);
    }
    auto s = make(3, 2, 1.0);
    s.params.f.values.assign(3, 0.0);
    EXPECT_EQ(SpinBoson(s.params, s.grid, s.basis).sigma(-1.0).nonZeros(), 0);
}

TEST(SpinBoson, SigmaPositiveBelowGap) {
    auto s = make(3, 3, 1.0);
    const SpinBoson sb(s.params, s.grid, s.basis);
    const CMatrix sig = oracle::dense(sb.sigma(Complex{0.5, 0.0}));
    EXPECT_LE((sig - sig.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sig);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-14);
}

TEST(SpinBoson, PropagatorInverse) {
    auto s = make(4, 2, 0.8);
    const SpinBoson sb(s.params, s.grid, s.basis);
    const Complex z{0.2, 0.9};
    const auto r = sb.propagator_inverse_apply(z, vacuum(s.basis));
    EXPECT_NEAR(std::abs(r.x[0] - oracle::friedrichs(z, s.params.omega_e, 0.0, 0.8, s.params.f.values, s.grid)), 0.0,
                1e-13);
    EXPECT_NEAR(std::abs(r.x[0] - friedrichs_vacuum_element(z, s.params.omega_e, 0.0, 0.8, s.params.f, s.grid)), 0.0,
                1e-13);
    std::mt19937_64 rng(3);
    const CVector psi = oracle::random_vector(s.basis.dimension(), rng);
    const auto x = sb.propagator_inverse_apply(z, psi).x;
    EXPECT_LE((sb.propagator(z) * x - psi).norm() / psi.norm(), 1e-12);
    s.params.lambda = 0.0;
    const SpinBoson free(s.params, s.grid, s.basis);
    const auto e = free_energies(s.grid, s.basis);
    const auto y = free.propagator_inverse_apply(z, psi).x;
    for (std::size_t k = 0; k < e.size(); ++k)
        EXPECT_NEAR(std::abs(y[k] - psi[k] / (s.params.omega_e - z + e[k])), 0.0, 1e-13);
}

TEST(SpinBoson, ResolventMatchesDense) {
    auto s = make(6, 3, 0.9);
    const SpinBoson sb(s.params, s.grid, s.basis);
    const SparseMatrix h = sb.assemble().matrix;
    std::mt19937_64 rng(4);
    for (Complex z : {Complex{0.5, 0.1}, Complex{-1.0, 0.0}, Complex{3.0, -2.0}}) {
        const auto psi = random_state(s.basis.dimension(), rng);
        SolveReport rep;
        const auto x = sb.resolvent_apply(z, psi, &rep);
        EXPECT_TRUE(rep.success);
        const CVector ref = oracle::dense_solve(h, z, psi.stacked());
        EXPECT_LE((x.stacked() - ref).norm() / ref.norm(), 1e-10);
    }
}

TEST(SpinBoson, ResolventIdentityAndConjugation) {
    auto s = make(4, 2, 0.6);
    const SpinBoson sb(s.params, s.grid, s.basis);
    std::mt19937_64 rng(6);
    const Complex z{0.3, 0.5}, w{1.7, -0.4};
    const auto psi = random_state(s.basis.dimension(), rng);
    const auto phi = random_state(s.basis.dimension(), rng);
    const CVector lhs = sb.resolvent_apply(z, psi).stacked() - sb.resolvent_apply(w, psi).stacked();
    const CVector rhs = (z - w) * sb.resolvent_apply(z, sb.resolvent_apply(w, psi)).stacked();
    EXPECT_LE((lhs - rhs).norm() / lhs.norm(), 1e-10);
    // <phi, R(z) psi> = <R(conj z) phi, psi>
    const Complex a = phi.stacked().dot(sb.resolvent_apply(z, psi).stacked());
    const Complex b = sb.resolvent_apply(std::conj(z), phi).stacked().dot(psi.stacked());
    EXPECT_NEAR(std::abs(a - b), 0.0, 1e-12 * std::abs(a));
}

TEST(SpinBoson, DomainShiftAndAction) {
    auto s = make(5, 3, 0.75);
    const SpinBoson sb(s.params, s.grid, s.basis);
    const CVector sh = sb.domain_shift(vacuum(s.basis));
    for (std::uint32_t i = 0; i < 5; ++i) {
        std::vector<std::uint32_t> one{i};
        const Complex expected = -0.75 * std::sqrt(s.grid.weights()[i]) * s.params.f.values[i] /
                                 (s.grid.dispersion()[i] + 1.0);
        EXPECT_NEAR(std::abs(sh[s.basis.index_of(one)] - expected), 0.0, 1e-15);
    }
    std::mt19937_64 rng(7);
    for (int t = 0; t < 10; ++t) {
        auto phi = random_state(s.basis.dimension(), rng);
        oracle::clear_top_sector(phi.excited, s.basis);
        oracle::clear_top_sector(phi.ground, s.basis);
        const TwoBlockState shifted{phi.excited, phi.ground + sb.domain_shift(phi.excited)};
        const CVector direct = sb.assemble().matrix * shifted.stacked();
        const CVector formula = sb.singular_action(phi).stacked();
        EXPECT_LE((direct - formula).norm() / direct.norm(), 1e-12);
    }
    s.params.lambda = 0.0;
    EXPECT_EQ(SpinBoson(s.params, s.grid, s.basis).domain_shift(vacuum(s.basis)).norm(), 0.0);
}

TEST(SpinBoson, RenormalizedBareEnergy) {
    GridSpec gs{1.0, std::exp(1.0), 2000, DispersionRule::linear, QuadratureRule::midpoint, 1.0};
    const auto g = build_grid(gs);
    SpinBosonParams p;
    p.omega_e = 1.0;
    p.lambda = 1.0;
    p.f = make_form_factor({1.0, 0.0}, g);
    p.renormalized = true;
    const FockBasis b(g.size(), 1);
    const SpinBoson sb(p, g, b);
    EXPECT_NEAR(sb.bare_omega_e(), 2.0, 1e-7); // dressed + lam^2 ln e
    const auto h = assemble_singular(p, g, b);
    EXPECT_EQ(oracle::dense(h.matrix)(0, 0), Complex(sb.bare_omega_e()));
    p.f.values.assign(g.size(), 0.0);
    EXPECT_EQ(SpinBoson(p, g, b).bare_omega_e(), 1.0);
}

TEST(SpinBoson, DressedVacuumPropagatorOracle) {
    GridSpec gs{1.0, 50.0, 300, DispersionRule::linear, QuadratureRule::midpoint, 1.0};
    const auto g = build_grid(gs);
    const FockBasis b(g.size(), 1);
    SpinBosonParams p;
    p.omega_e = 0.7;
    p.lambda = 0.9;
    p.f = make_form_factor({1.0, 0.0}, g);
    p.renormalized = true;
    const Complex z{0.4, 0.6};
    for (auto anchor : {CountertermAnchor::norm_minus_one, CountertermAnchor::resolvent_at_minus_one}) {
        p.anchor = anchor;
        const SpinBoson sb(p, g, b);
        const Complex got = sb.propagator_inverse_apply(z, vacuum(b)).x[0];
        Complex bracket{};
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double om = g.dispersion()[i];
            const double ref = anchor == CountertermAnchor::norm_minus_one ? om : om + 1.0;
            bracket += g.weights()[i] * (1.0 / (om - z) - 1.0 / ref);
        }
        const Complex expected = 1.0 / (p.omega_e - z - p.lambda * p.lambda * bracket);
        EXPECT_NEAR(std::abs(got - expected), 0.0, 1e-12);
    }
}
