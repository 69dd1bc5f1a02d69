#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "sbren/fieldops.hpp"

using namespace sbren;

namespace {

ModeGrid small_grid(std::size_t m) {
    GridSpec s;
    s.k_min = 1.0;
    s.k_max = 3.0;
    s.count = m;
    return build_grid(s);
}

FormFactor wavy(const ModeGrid& g, double phase) {
    FormFactor f;
    f.label = "wavy";
    for (std::size_t i = 0; i < g.size(); ++i)
        f.values.emplace_back(std::cos(phase + 1.3 * i), std::sin(2.0 * phase - 0.7 * i));
    return f;
}

} // namespace

TEST(FieldOps, DGammaDiagonal) {
    const ModeGrid g({1.0}, {1.0}, {1.5});
    const FockBasis b(1, 3);
    const auto d = dgamma(g, b);
    EXPECT_EQ(d.sector_shift, 0);
    CMatrix dm = oracle::dense(d.matrix);
    EXPECT_EQ(dm(0, 0), Complex(0.0));
    EXPECT_EQ(dm(2, 2), Complex(3.0));
    const auto g3 = small_grid(5);
    const FockBasis b3(5, 2);
    CMatrix d3 = oracle::dense(dgamma(g3, b3).matrix);
    double trace = 0.0, sum = 0.0;
    for (std::size_t k = 1; k <= 5; ++k) trace += d3(k, k).real();
    for (double w : g3.dispersion()) sum += w;
    EXPECT_NEAR(trace, sum, 1e-13);
}

TEST(FieldOps, AnnihilatorOnVacuumAndCCR) {
    const auto g = small_grid(3);
    const FockBasis b(3, 3);
    const auto f = wavy(g, 0.2), h = wavy(g, 1.1);
    const auto a = annihilator(f, g, b);
    EXPECT_EQ(a.sector_shift, -1);
    EXPECT_EQ((a.matrix * vacuum(b)).norm(), 0.0);
    const auto ad = creator(h, g, b);
    EXPECT_EQ(ad.sector_shift, 1);
    const CVector r = a.matrix * (ad.matrix * vacuum(b));
    const Complex expected = grid_inner(f, h, g);
    EXPECT_NEAR(std::abs(r[0] - expected), 0.0, 1e-14);
    EXPECT_NEAR(r.tail(r.size() - 1).norm(), 0.0, 1e-15);
    EXPECT_NEAR(std::pow((ad.matrix * vacuum(b)).norm(), 2), grid_inner(h, h, g).real(), 1e-13);
}

TEST(FieldOps, CommutatorBelowCeiling) {
    const auto g = small_grid(3);
    const FockBasis b(3, 3);
    const auto f = wavy(g, 0.4), h = wavy(g, 2.0);
    const CMatrix a = oracle::dense(annihilator(f, g, b).matrix);
    const CMatrix ad = oracle::dense(creator(h, g, b).matrix);
    const CMatrix comm = a * ad - ad * a;
    const Complex c = grid_inner(f, h, g);
    const auto top = b.sector_offsets()[3];
    for (std::size_t col = 0; col < top; ++col)
        for (std::size_t row = 0; row < b.dimension(); ++row)
            EXPECT_NEAR(std::abs(comm(row, col) - (row == col ? c : Complex{})), 0.0, 1e-13);
}

TEST(FieldOps, AdjointnessBelowCeiling) {
    const auto g = small_grid(4);
    const FockBasis b(4, 2);
    const auto f = wavy(g, 0.9);
    const auto a = annihilator(f, g, b).matrix;
    const auto ad = creator(f, g, b).matrix;
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        CVector x = oracle::random_vector(b.dimension(), rng), y = oracle::random_vector(b.dimension(), rng);
        oracle::clear_top_sector(x, b);
        EXPECT_NEAR(std::abs((ad * x).dot(y) - x.dot(a * y)), 0.0, 1e-12);
    }
}

TEST(FieldOps, TwoBosonStateMatchesKernel) {
    const auto g = small_grid(3);
    const FockBasis b(3, 3);
    const auto f = wavy(g, 0.3);
    const auto a = annihilator(f, g, b).matrix;
    for (std::uint32_t i = 0; i < 3; ++i) {
        CVector two = CVector::Zero(b.dimension());
        std::vector<std::uint32_t> ii{i, i}, one{i};
        two[b.index_of(ii)] = 1.0;
        const CVector r = a * two;
        const Complex expected = std::sqrt(2.0) * std::sqrt(g.weights()[i]) * std::conj(f.values[i]);
        EXPECT_NEAR(std::abs(r[b.index_of(one)] - expected), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(r.norm() - std::abs(expected)), 0.0, 1e-14);
    }
}

TEST(FieldOps, AnnihilatorMatchesTupleKernel) {
    GridSpec s{1.0, 2.5, 3, DispersionRule::linear, QuadratureRule::trapezoid, 1.0};
    const auto g = build_grid(s); // unequal weights
    const FockBasis b(3, 3);
    const auto f = wavy(g, 1.7);
    const auto a = annihilator(f, g, b).matrix;
    std::mt19937_64 rng(7);
    for (int t = 0; t < 5; ++t) {
        const CVector x = oracle::random_vector(b.dimension(), rng);
        const CVector ref = oracle::kernel_annihilate(x, f.values, g, b);
        EXPECT_LE((a * x - ref).norm(), 1e-12 * ref.norm());
    }
}

TEST(FieldOps, NelsonBound) {
    const auto g = small_grid(4);
    const FockBasis b(4, 3);
    std::mt19937_64 rng(8);
    for (int k = 0; k < 5; ++k) {
        const auto f = wavy(g, 0.5 * k);
        const auto a = annihilator(f, g, b).matrix;
        const double nf = scale_norm(f, -1.0, g);
        for (int t = 0; t < 100; ++t) {
            const CVector x = oracle::random_vector(b.dimension(), rng);
            EXPECT_LE((a * x).norm(), nf * fock_scale_norm(x, 1.0, g, b));
        }
    }
}

TEST(FieldOps, OperatorScaleNorms) {
    const auto g = small_grid(4);
    const FockBasis b(4, 2);
    FieldOperator zero{SparseMatrix(b.dimension(), b.dimension()), 0};
    EXPECT_EQ(operator_scale_norm(zero, 0, 0, g, b, 2), 0.0);
    FieldOperator h1{dgamma(g, b).matrix + sparse_identity(b.dimension()), 0};
    EXPECT_NEAR(operator_scale_norm(h1, 1.0, -1.0, g, b, 1), 1.0, 1e-12);
    // one-boson closed form: sup |<f, psi>_w| / ||psi||_{F_1} = (sum w |f|^2 / (1 + omega))^{1/2}
    const auto f = wavy(g, 0.6);
    double closed = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        closed += g.weights()[i] * std::norm(f.values[i]) / (1.0 + g.dispersion()[i]);
    closed = std::sqrt(closed);
    const double est = operator_scale_norm(annihilator(f, g, b), 1.0, 0.0, g, b, 3);
    EXPECT_GE(est, closed * (1 - 1e-9));
    EXPECT_LE(est, scale_norm(f, -1.0, g));
}

TEST(FieldOps, GridMismatchRejected) {
    const auto g = small_grid(3);
    const FockBasis b(4, 2);
    EXPECT_THROW(dgamma(g, b), std::invalid_argument);
    FormFactor bad{std::vector<Complex>(2, 1.0), "short"};
    EXPECT_THROW(annihilator(bad, g, FockBasis(3, 2)), std::invalid_argument);
}

TEST(FieldOps, TripletDump) {
    const ModeGrid g({1.0}, {1.0}, {1.5});
    const FockBasis b(1, 2);
    std::ostringstream os;
    write_triplets(os, dgamma(g, b).matrix);
    EXPECT_EQ(os.str(), "1 1 1.5 0\n2 2 3 0\n");
}
