#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "sbren/gsbmodel.hpp"
#include "sbren/sbmodel.hpp"

using namespace sbren;

namespace {

ModeGrid grid12(std::size_t m) {
    GridSpec s;
    s.count = m;
    return build_grid(s);
}

CMatrix scalar(double v) {
    CMatrix m(1, 1);
    m(0, 0) = v;
    return m;
}

} // namespace

TEST(Gsb, ReducesToSpinBosonBitExactly) {
    const auto g = grid12(4);
    const FockBasis b(4, 3);
    SpinBosonParams sp;
    sp.omega_e = 1.25;
    sp.lambda = 0.6;
    sp.f = make_form_factor({0.9, 0.5}, g);
    GsbParams gp;
    gp.e_e = scalar(1.25);
    gp.e_g = scalar(0.0);
    gp.channels.push_back({scalar(1.0), sp.f});
    gp.lambda = 0.6;
    EXPECT_TRUE(oracle::same_triplets(assemble_gsb(gp, g, b).matrix, assemble_regular(sp, g, b).matrix));
    const Complex z = -1.0;
    EXPECT_TRUE(oracle::same_triplets(gsb_sigma(z, gp, g, b), SpinBoson(sp, g, b).sigma(z)));
}

TEST(Gsb, DecoupledSpectrum) {
    const auto g = grid12(3);
    const FockBasis b(3, 2);
    GsbParams p;
    p.e_e = CMatrix(2, 2);
    p.e_e << 2.0, 0.5, 0.5, 1.0;
    p.e_g = scalar(0.3);
    p.channels.push_back({CMatrix::Ones(2, 1), make_form_factor({1.0, 0.0}, g)});
    const auto h = oracle::dense(assemble_gsb(p, g, b).matrix);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    Eigen::SelfAdjointEigenSolver<CMatrix> ee(p.e_e);
    std::vector<double> expected;
    for (double e : free_energies(g, b)) {
        expected.push_back(ee.eigenvalues()[0] + e);
        expected.push_back(ee.eigenvalues()[1] + e);
        expected.push_back(0.3 + e);
    }
    std::sort(expected.begin(), expected.end());
    for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_NEAR(es.eigenvalues()[k], expected[k], 1e-12);
}

TEST(Gsb, MultilevelAgainstTensorBuild) {
    const auto g = grid12(3);
    const FockBasis b(3, 2);
    const auto f1 = make_form_factor({1.0, 0.0}, g), f2 = make_form_factor({0.5, 1.0}, g);
    GsbParams p;
    p.e_e = CMatrix::Zero(2, 2);
    p.e_e(0, 0) = 1.0;
    p.e_e(1, 1) = 1.5;
    p.e_g = scalar(0.0);
    CMatrix s1 = CMatrix::Zero(2, 1), s2 = CMatrix::Zero(2, 1);
    s1(0, 0) = 1.0;
    s2(1, 0) = 1.0;
    p.channels = {{s1, f1}, {s2, f2}};
    p.lambda = 0.7;
    const CMatrix h = oracle::dense(assemble_gsb(p, g, b).matrix);
    // independent C^3 (x) F construction
    const auto d = static_cast<Eigen::Index>(b.dimension());
    const CMatrix dg = oracle::dense(dgamma(g, b).matrix);
    const CMatrix a1 = oracle::dense(annihilator(f1, g, b).matrix), a2 = oracle::dense(annihilator(f2, g, b).matrix);
    CMatrix ref = CMatrix::Zero(3 * d, 3 * d);
    const CMatrix id = CMatrix::Identity(d, d);
    ref.block(0, 0, d, d) = 1.0 * id + dg;
    ref.block(d, d, d, d) = 1.5 * id + dg;
    ref.block(2 * d, 2 * d, d, d) = dg;
    ref.block(0, 2 * d, d, d) = 0.7 * a1;
    ref.block(d, 2 * d, d, d) = 0.7 * a2;
    ref.block(2 * d, 0, d, d) = 0.7 * a1.adjoint();
    ref.block(2 * d, d, d, d) = 0.7 * a2.adjoint();
    EXPECT_LE((h - ref).cwiseAbs().maxCoeff(), 1e-15);
    // no e-e or g-g coupling beyond the free parts
    EXPECT_EQ(h.block(0, d, d, d).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Gsb, SigmaVacuumOverlap) {
    const auto g = grid12(400);
    const FockBasis b(400, 1);
    FormFactor f1 = make_form_factor({1.0, 0.0}, g), f2 = make_form_factor({1.0, 1.0}, g);
    GsbParams p;
    p.e_e = CMatrix::Identity(2, 2);
    p.e_g = scalar(0.0);
    CMatrix s1 = CMatrix::Zero(2, 1), s2 = CMatrix::Zero(2, 1);
    s1(0, 0) = 1.0;
    s2(1, 0) = 1.0;
    p.channels = {{s1, f1}, {s2, f2}};
    p.lambda = 1.0;
    const CMatrix s = oracle::dense(gsb_sigma(-1.0, p, g, b));
    const auto d = static_cast<Eigen::Index>(b.dimension());
    EXPECT_NEAR(s(0, d).real(), std::log(4.0 / 3.0), 1e-5); // <e_1 Omega, S e_2 Omega>
    EXPECT_NEAR(s(0, 0).real(), std::log(1.5), 1e-5);
    EXPECT_LE((s - s.adjoint()).cwiseAbs().maxCoeff(), 1e-16);
}

TEST(Gsb, NondiagonalGroundResolventMatchesDense) {
    const auto g = grid12(3);
    const FockBasis b(3, 2);
    GsbParams p;
    p.e_e = CMatrix(2, 2);
    p.e_e << 1.0, Complex(0.2, 0.1), Complex(0.2, -0.1), 1.4;
    p.e_g = CMatrix(2, 2);
    p.e_g << 0.2, 0.3, 0.3, 0.5;
    CMatrix s1(2, 2), s2(2, 2);
    s1 << 1.0, 0.2, 0.0, 0.7;
    s2 << 0.0, Complex(0, 0.5), 0.4, 0.1;
    p.channels = {{s1, make_form_factor({1.0, 0.0}, g)}, {s2, make_form_factor({0.8, 0.5}, g)}};
    p.lambda = 0.8;
    const GsbModel m(p, g, b);
    const SparseMatrix h = m.assemble().matrix;
    EXPECT_EQ(max_hermiticity_defect(h), 0.0);
    std::mt19937_64 rng(9);
    const auto de = 2 * b.dimension();
    const TwoBlockState psi{oracle::random_vector(de, rng), oracle::random_vector(de, rng)};
    for (Complex z : {Complex{0.1, 0.4}, Complex{-1.0, 0.0}}) {
        const CVector ref = oracle::dense_solve(h, z, psi.stacked());
        EXPECT_LE((m.resolvent_apply(z, psi).stacked() - ref).norm() / ref.norm(), 1e-10);
    }
    const CMatrix sig = oracle::dense(m.sigma(Complex{-0.5, 0.0}));
    EXPECT_LE((sig - sig.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Gsb, SingularActionIdentity) {
    const auto g = grid12(3);
    const FockBasis b(3, 3);
    GsbParams p;
    p.e_e = CMatrix::Identity(2, 2);
    p.e_g = CMatrix(2, 2);
    p.e_g << 0.5, 0.1, 0.1, 0.2;
    std::mt19937_64 rng(11);
    for (int c = 0; c < 2; ++c)
        p.channels.push_back({CMatrix::Random(2, 2), make_form_factor({1.0, 0.25 * c}, g)});
    p.lambda = 0.9;
    const auto d = 2 * b.dimension();
    for (int t = 0; t < 5; ++t) {
        TwoBlockState phi{oracle::random_vector(d, rng), oracle::random_vector(d, rng)};
        oracle::clear_top_sector(phi.excited, b);
        oracle::clear_top_sector(phi.ground, b);
        EXPECT_LE(gsb_singular_action(phi, p, g, b).max_relative_defect, 1e-12);
    }
    p.lambda = 0.0;
    TwoBlockState phi{oracle::random_vector(d, rng), oracle::random_vector(d, rng)};
    const auto r = gsb_singular_action(phi, p, g, b);
    const GsbModel m(p, g, b);
    EXPECT_LE((r.action.excited - m.system().h_e() * phi.excited).norm(), 1e-14);
}

TEST(Gsb, ValidationAndCounterterm) {
    const auto g = grid12(3);
    GsbParams p;
    p.e_e = scalar(1.0);
    p.e_g = scalar(-1.0);
    p.channels.push_back({scalar(1.0), make_form_factor({1.0, 0.0}, g)});
    EXPECT_THROW(validate(p, g), std::invalid_argument);
    p.e_g = scalar(0.0);
    p.channels[0].sigma_plus = CMatrix::Ones(2, 1);
    EXPECT_THROW(validate(p, g), std::invalid_argument);
    p.channels[0].sigma_plus = scalar(1.0);
    p.lambda = 2.0;
    p.experimental_counterterm = true;
    const double n = scale_norm(p.channels[0].f, -1.0, g);
    EXPECT_NEAR(gsb_counterterm(p, g)(0, 0).real(), 4.0 * n * n, 1e-14);
    const GsbModel m(p, g, FockBasis(3, 1));
    EXPECT_NEAR(m.effective_e_e()(0, 0).real(), 1.0 + 4.0 * n * n, 1e-14);
}
