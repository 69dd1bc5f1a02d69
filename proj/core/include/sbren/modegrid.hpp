// modegrid.hpp - quadrature discretization of the one-particle space and
// the scale norms ||f||_s = (sum_i w_i omega_i^s |f_i|^2)^{1/2}

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sbren {

using Complex = std::complex<double>;

enum class DispersionRule { linear, quadratic, relativistic };
enum class QuadratureRule { midpoint, trapezoid, log_midpoint };

std::string to_string(DispersionRule rule);
std::string to_string(QuadratureRule rule);
DispersionRule parse_dispersion(const std::string& name);
QuadratureRule parse_quadrature(const std::string& name);

/// omega(k) for a named rule; `mass` enters only the relativistic rule
/// omega = sqrt(k^2 + mass^2).
double dispersion_value(DispersionRule rule, double k, double mass);

struct GridSpec {
    double k_min{1.0};
    double k_max{2.0};
    std::size_t count{1};
    DispersionRule dispersion{DispersionRule::linear};
    QuadratureRule quadrature{QuadratureRule::midpoint};
    double mass{1.0};
};

/// Immutable mode grid: nodes k_i (strictly increasing), weights w_i > 0,
/// dispersion samples omega_i >= m > 0 with m = min_i omega_i.
class ModeGrid {
public:
    /// omega_support is the largest energy the grid cells cover (the
    /// dispersion at k_max for built grids); it defaults to max omega_i.
    ModeGrid(std::vector<double> points, std::vector<double> weights, std::vector<double> dispersion,
             double omega_support = 0.0);

    std::size_t size() const noexcept { return points_.size(); }
    std::span<const double> points() const noexcept { return points_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::span<const double> dispersion() const noexcept { return dispersion_; }
    double mass_gap() const noexcept { return mass_gap_; }
    double omega_support() const noexcept { return omega_support_; }

private:
    std::vector<double> points_;
    std::vector<double> weights_;
    std::vector<double> dispersion_;
    double mass_gap_{0.0};
    double omega_support_{0.0};
};

ModeGrid build_grid(const GridSpec& spec);

struct FormFactor {
    std::vector<Complex> values;
    std::string label;
};

/// Named form-factor rule f(k) = coefficient * k^{-exponent}.
struct FormFactorRule {
    double coefficient{1.0};
    double exponent{0.0};

    std::string label() const;
};

FormFactor make_form_factor(const FormFactorRule& rule, const ModeGrid& grid);

/// Throws std::invalid_argument unless f matches the grid and is finite.
void check_form_factor(const FormFactor& f, const ModeGrid& grid);

double scale_norm(const FormFactor& f, double s, const ModeGrid& grid);

/// sum_i w_i omega_i^s conj(f_i) g_i
Complex scale_inner(const FormFactor& f, const FormFactor& g, double s, const ModeGrid& grid);

inline Complex grid_inner(const FormFactor& f, const FormFactor& g, const ModeGrid& grid) {
    return scale_inner(f, g, 0.0, grid);
}

struct DecayFit {
    double p_fit{0.0};   // slope of log I_n against log n over [n_max/2, n_max]
    double r_star{0.0};  // min(1, s - p_fit)
    double r_min{0.0};   // max(s - 1, s + p_fit): smallest r with I_n = O(n^{r-s})
    std::vector<double> integrals; // I_1 .. I_{n_max}
};

/// Decay of I_n = sum_i w_i |f_i|^2 / (omega_i + (n-1) m)^s, which decides
/// membership in the classes H^r_{-s}. Requires s in (1, 2] and n_max >= 8.
DecayFit decay_exponent(const FormFactor& f, double s, const ModeGrid& grid, int n_max);

/// Least-squares slope of log|y| against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

} // namespace sbren
