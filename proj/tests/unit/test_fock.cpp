#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "sbren/fock.hpp"

using namespace sbren;

TEST(Fock, Dimensions) {
    EXPECT_EQ(FockBasis(1, 3).dimension(), 4u);
    EXPECT_EQ(FockBasis(3, 2).dimension(), 10u);
    const FockBasis b(8, 4);
    EXPECT_EQ(b.dimension(), 495u);
    const std::vector<std::size_t> sectors{1, 8, 36, 120, 330};
    for (std::size_t n = 0; n <= 4; ++n)
        EXPECT_EQ(b.sector_offsets()[n + 1] - b.sector_offsets()[n], sectors[n]);
    EXPECT_EQ(FockBasis(5, 0).dimension(), 1u);
}

TEST(Fock, EnumerationMatchesBruteForce) {
    const FockBasis b(4, 3);
    std::set<std::vector<std::uint32_t>> seen;
    for (std::size_t k = 0; k < b.dimension(); ++k) {
        const auto occ = b.occupation(k);
        std::uint32_t total = 0;
        for (auto n : occ) total += n;
        EXPECT_EQ(total, b.sector_of(k));
        EXPECT_TRUE(seen.insert(occ).second);
        EXPECT_EQ(b.index_of_occupation(occ), k);
        EXPECT_EQ(b.index_of(b.modes_of(k)), k);
    }
    // every occupation vector with total <= 3 appears
    std::size_t count = 0;
    for (std::uint32_t a = 0; a <= 3; ++a)
        for (std::uint32_t c = 0; a + c <= 3; ++c)
            for (std::uint32_t d = 0; a + c + d <= 3; ++d)
                for (std::uint32_t e = 0; a + c + d + e <= 3; ++e) ++count;
    EXPECT_EQ(count, b.dimension());
}

TEST(Fock, SectorOrderIsLexicographicInModeLists) {
    const FockBasis b(3, 2);
    for (std::size_t n = 0; n <= 2; ++n)
        for (auto k = b.sector_offsets()[n] + 1; k < b.sector_offsets()[n + 1]; ++k) {
            const auto p = b.modes_of(k - 1), q = b.modes_of(k);
            EXPECT_TRUE(std::lexicographical_compare(p.begin(), p.end(), q.begin(), q.end()));
        }
}

TEST(Fock, SizingCap) {
    EXPECT_THROW(FockBasis(200, 6), SizingError);
    EXPECT_THROW(FockBasis(10, 3, 100), SizingError);
    EXPECT_NO_THROW(FockBasis(10, 3, 286));
    EXPECT_THROW(FockBasis(0, 3), std::invalid_argument);
}

TEST(Fock, IndexRejectsBadLists) {
    const FockBasis b(3, 2);
    std::vector<std::uint32_t> unsorted{2, 1};
    EXPECT_THROW(b.index_of(unsorted), std::invalid_argument);
    std::vector<std::uint32_t> too_long{0, 0, 0};
    EXPECT_THROW(b.index_of(too_long), std::out_of_range);
    std::vector<std::uint32_t> bad_mode{3};
    EXPECT_THROW(b.index_of(bad_mode), std::invalid_argument);
}

TEST(Fock, ScaleNorms) {
    const ModeGrid g({1.0, 2.0}, {1.0, 1.0}, {1.5, 2.0});
    const FockBasis b(2, 3);
    const CVector omega = vacuum(b);
    for (double s : {-2.0, 0.0, 1.0, 3.0}) EXPECT_EQ(fock_scale_norm(omega, s, g, b), 1.0);
    CVector one = CVector::Zero(b.dimension());
    std::vector<std::uint32_t> m{0};
    one[b.index_of(m)] = 1.0;
    EXPECT_DOUBLE_EQ(fock_scale_norm(one, 2.0, g, b), 2.5);
    std::mt19937_64 rng(1);
    const CVector r = oracle::random_vector(b.dimension(), rng);
    EXPECT_DOUBLE_EQ(fock_scale_norm(r, 0.0, g, b), r.norm());
}

TEST(Fock, DualityAndMonotonicity) {
    const ModeGrid g({1.0, 2.0, 3.0}, {0.5, 0.5, 0.5}, {1.0, 2.0, 3.0});
    const FockBasis b(3, 3);
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const CVector x = oracle::random_vector(b.dimension(), rng);
        const CVector y = oracle::random_vector(b.dimension(), rng);
        for (double s : {0.5, 1.0, 2.0})
            EXPECT_LE(std::abs(x.dot(y)), fock_scale_norm(x, -s, g, b) * fock_scale_norm(y, s, g, b) * (1 + 1e-14));
        EXPECT_LE(fock_scale_norm(x, -1.0, g, b), fock_scale_norm(x, 0.0, g, b));
        EXPECT_LE(fock_scale_norm(x, 0.0, g, b), fock_scale_norm(x, 1.5, g, b));
    }
}

TEST(Fock, TextRoundTrip) {
    const FockBasis b(3, 2);
    std::mt19937_64 rng(3);
    CVector x = oracle::random_vector(b.dimension(), rng);
    x[4] = 0.0;
    std::stringstream ss;
    write_state(ss, b, x);
    const CVector y = read_state(ss, b);
    EXPECT_EQ((x - y).norm(), 0.0);
    std::istringstream bad("1 1 1 0.5 0\n");
    EXPECT_THROW(read_state(bad, b), std::invalid_argument);
}

TEST(Fock, FreeEnergies) {
    const ModeGrid g({1.0}, {1.0}, {1.5});
    const FockBasis b(1, 3);
    const auto e = free_energies(g, b);
    EXPECT_EQ(e[0], 0.0);
    EXPECT_EQ(e[2], 3.0);
}
