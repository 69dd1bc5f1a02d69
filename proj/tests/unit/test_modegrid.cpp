#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "sbren/modegrid.hpp"

using namespace sbren;

namespace {

ModeGrid flat(double a, double b, std::size_t n, QuadratureRule q = QuadratureRule::midpoint,
              DispersionRule d = DispersionRule::linear) {
    GridSpec s;
    s.k_min = a;
    s.k_max = b;
    s.count = n;
    s.quadrature = q;
    s.dispersion = d;
    return build_grid(s);
}

} // namespace

TEST(ModeGrid, SingleCellMidpoint) {
    const auto g = flat(1, 2, 1);
    ASSERT_EQ(g.size(), 1u);
    EXPECT_EQ(g.points()[0], 1.5);
    EXPECT_EQ(g.weights()[0], 1.0);
    EXPECT_EQ(g.dispersion()[0], 1.5);
    EXPECT_EQ(g.mass_gap(), 1.5);
}

TEST(ModeGrid, WeightsSumToLength) {
    const auto g = flat(1, 2, 100);
    const auto w = g.weights();
    EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-13);
    const auto t = flat(1, 2, 101, QuadratureRule::trapezoid);
    const auto wt = t.weights();
    EXPECT_NEAR(std::accumulate(wt.begin(), wt.end(), 0.0), 1.0, 1e-13);
    const auto l = flat(1, 1000, 300, QuadratureRule::log_midpoint);
    const auto wl = l.weights();
    EXPECT_NEAR(std::accumulate(wl.begin(), wl.end(), 0.0), 999.0, 0.05); // O(h^2) in ln k
}

TEST(ModeGrid, QuadraticDispersionArithmetic) {
    const auto g = flat(1, 4, 2, QuadratureRule::midpoint, DispersionRule::quadratic);
    EXPECT_EQ(g.points()[0], 1.75);
    EXPECT_EQ(g.points()[1], 3.25);
    EXPECT_EQ(g.dispersion()[0], 3.0625);
    EXPECT_EQ(g.dispersion()[1], 10.5625);
}

TEST(ModeGrid, RejectsBadSpecs) {
    GridSpec s;
    s.count = 0;
    EXPECT_THROW(build_grid(s), std::invalid_argument);
    s.count = 4;
    s.k_min = -2;
    s.k_max = 1;
    EXPECT_THROW(build_grid(s), std::invalid_argument); // omega = k <= 0 somewhere
    EXPECT_THROW(ModeGrid({1.0, 0.5}, {1, 1}, {1, 1}), std::invalid_argument);
    EXPECT_THROW(ModeGrid({1.0}, {0.0}, {1}), std::invalid_argument);
    EXPECT_THROW(ModeGrid({1.0}, {1.0}, {0.0}), std::invalid_argument);
}

TEST(ModeGrid, ScaleNormExamples) {
    const auto g = flat(1, 2, 400);
    const auto one = make_form_factor({1.0, 0.0}, g);
    EXPECT_NEAR(scale_norm(one, 0.0, g), 1.0, 1e-13);
    EXPECT_NEAR(scale_norm(one, -1.0, g), std::sqrt(std::log(2.0)), 1e-6);
    const auto half = make_form_factor({1.0, 0.5}, g);
    EXPECT_NEAR(scale_norm(half, -1.0, g), std::sqrt(0.5), 1e-6);
}

TEST(ModeGrid, MidpointSecondOrder) {
    std::vector<double> err;
    for (std::size_t n : {25, 50, 100, 200}) {
        const auto g = flat(1, 2, n);
        const auto one = make_form_factor({1.0, 0.0}, g);
        const double v = scale_norm(one, -1.0, g);
        err.push_back(std::abs(v * v - std::log(2.0)));
    }
    for (std::size_t i = 1; i < err.size(); ++i) EXPECT_NEAR(std::log2(err[i - 1] / err[i]), 2.0, 0.05);
}

TEST(ModeGrid, ScaleOrdering) {
    GridSpec s{0.3, 5.0, 60, DispersionRule::relativistic, QuadratureRule::midpoint, 0.7};
    const auto g = build_grid(s);
    FormFactor f;
    f.label = "mixed";
    for (std::size_t i = 0; i < g.size(); ++i) f.values.emplace_back(std::sin(1.0 + i), std::cos(3.0 * i));
    const double m = g.mass_gap();
    for (double a : {-2.0, -1.0, 0.0, 0.5})
        for (double b : {-1.0, 0.0, 1.0, 2.0}) {
            if (a > b) continue;
            EXPECT_LE(scale_norm(f, a, g), std::pow(m, 0.5 * (a - b)) * scale_norm(f, b, g) * (1 + 1e-14));
        }
}

TEST(ModeGrid, DecayFlatFormFactor) {
    const auto g = flat(1, 1000, 20000);
    const auto one = make_form_factor({1.0, 0.0}, g);
    const auto d2 = decay_exponent(one, 2.0, g, 64);
    EXPECT_NEAR(d2.p_fit, -1.0, 0.05);
    EXPECT_EQ(d2.r_star, 1.0);
    GridSpec wide{1.0, 1e6, 600, DispersionRule::linear, QuadratureRule::log_midpoint, 1.0};
    const auto gw = build_grid(wide);
    const auto onew = make_form_factor({1.0, 0.0}, gw);
    const auto d15 = decay_exponent(onew, 1.5, gw, 64);
    EXPECT_NEAR(d15.p_fit, -0.5, 0.05);
    EXPECT_EQ(d15.r_star, 1.0);
    EXPECT_EQ(d15.integrals.size(), 64u);
}

TEST(ModeGrid, DecaySingleMode) {
    const auto g = flat(1, 2, 10);
    FormFactor f{std::vector<Complex>(10, 0.0), "lowest"};
    f.values[0] = 1.0;
    const auto d = decay_exponent(f, 2.0, g, 256);
    EXPECT_NEAR(d.p_fit, -2.0, 0.02);
    EXPECT_EQ(d.r_star, 1.0);
    FormFactor zero{std::vector<Complex>(10, 0.0), "zero"};
    EXPECT_THROW(decay_exponent(zero, 2.0, g, 16), std::invalid_argument);
    EXPECT_THROW(decay_exponent(f, 0.5, g, 16), std::invalid_argument);
    EXPECT_THROW(decay_exponent(f, 2.0, g, 4), std::invalid_argument);
}

TEST(ModeGrid, RuleNamesRoundTrip) {
    for (auto r : {DispersionRule::linear, DispersionRule::quadratic, DispersionRule::relativistic})
        EXPECT_EQ(parse_dispersion(to_string(r)), r);
    for (auto r : {QuadratureRule::midpoint, QuadratureRule::trapezoid, QuadratureRule::log_midpoint})
        EXPECT_EQ(parse_quadrature(to_string(r)), r);
    EXPECT_THROW(parse_dispersion("cubic"), std::invalid_argument);
}
