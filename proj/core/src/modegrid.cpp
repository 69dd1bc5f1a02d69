#include "sbren/modegrid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sbren {

std::string to_string(DispersionRule rule) {
    switch (rule) {
    case DispersionRule::linear: return "linear";
    case DispersionRule::quadratic: return "quadratic";
    case DispersionRule::relativistic: return "relativistic";
    }
    return "unknown";
}

std::string to_string(QuadratureRule rule) {
    switch (rule) {
    case QuadratureRule::midpoint: return "midpoint";
    case QuadratureRule::trapezoid: return "trapezoid";
    case QuadratureRule::log_midpoint: return "log_midpoint";
    }
    return "unknown";
}

DispersionRule parse_dispersion(const std::string& name) {
    if (name == "linear") return DispersionRule::linear;
    if (name == "quadratic") return DispersionRule::quadratic;
    if (name == "relativistic") return DispersionRule::relativistic;
    throw std::invalid_argument("unknown dispersion rule '" + name + "'");
}

QuadratureRule parse_quadrature(const std::string& name) {
    if (name == "midpoint") return QuadratureRule::midpoint;
    if (name == "trapezoid") return QuadratureRule::trapezoid;
    if (name == "log_midpoint") return QuadratureRule::log_midpoint;
    throw std::invalid_argument("unknown quadrature rule '" + name + "'");
}

double dispersion_value(DispersionRule rule, double k, double mass) {
    switch (rule) {
    case DispersionRule::linear: return k;
    case DispersionRule::quadratic: return k * k;
    case DispersionRule::relativistic: return std::sqrt(k * k + mass * mass);
    }
    return k;
}

ModeGrid::ModeGrid(std::vector<double> points, std::vector<double> weights, std::vector<double> dispersion,
                   double omega_support)
    : points_(std::move(points)), weights_(std::move(weights)), dispersion_(std::move(dispersion)) {
    if (points_.empty()) throw std::invalid_argument("ModeGrid: at least one mode is required");
    if (weights_.size() != points_.size() || dispersion_.size() != points_.size())
        throw std::invalid_argument("ModeGrid: points, weights and dispersion lengths differ");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i]) || !std::isfinite(weights_[i]) || !std::isfinite(dispersion_[i]))
            throw std::invalid_argument("ModeGrid: non-finite entry");
        if (i > 0 && !(points_[i] > points_[i - 1]))
            throw std::invalid_argument("ModeGrid: points must be strictly increasing");
        if (!(weights_[i] > 0.0)) throw std::invalid_argument("ModeGrid: weights must be positive");
    }
    mass_gap_ = *std::min_element(dispersion_.begin(), dispersion_.end());
    if (!(mass_gap_ > 0.0))
        throw std::invalid_argument("ModeGrid: dispersion violates the mass gap (min omega <= 0)");
    omega_support_ = std::max(omega_support, *std::max_element(dispersion_.begin(), dispersion_.end()));
}

ModeGrid build_grid(const GridSpec& spec) {
    if (spec.count == 0) throw std::invalid_argument("build_grid: count must be >= 1");
    if (!(spec.k_min < spec.k_max)) throw std::invalid_argument("build_grid: need k_min < k_max");
    const std::size_t n = spec.count;
    std::vector<double> k(n), w(n), om(n);
    switch (spec.quadrature) {
    case QuadratureRule::midpoint: {
        const double h = (spec.k_max - spec.k_min) / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double lo = spec.k_min + h * static_cast<double>(i);
            const double hi = i + 1 == n ? spec.k_max : spec.k_min + h * static_cast<double>(i + 1);
            k[i] = 0.5 * (lo + hi);
            w[i] = hi - lo;
        }
        break;
    }
    case QuadratureRule::trapezoid: {
        if (n < 2) throw std::invalid_argument("build_grid: trapezoid rule needs count >= 2");
        const double h = (spec.k_max - spec.k_min) / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            k[i] = i + 1 == n ? spec.k_max : spec.k_min + h * static_cast<double>(i);
            w[i] = (i == 0 || i + 1 == n) ? 0.5 * h : h;
        }
        break;
    }
    case QuadratureRule::log_midpoint: {
        // midpoint rule in u = ln k: nodes are geometric cell midpoints, w = k du
        if (!(spec.k_min > 0.0)) throw std::invalid_argument("build_grid: log_midpoint needs k_min > 0");
        const double du = std::log(spec.k_max / spec.k_min) / static_cast<double>(n);
        const double u0 = std::log(spec.k_min);
        for (std::size_t i = 0; i < n; ++i) {
            k[i] = std::exp(u0 + du * (static_cast<double>(i) + 0.5));
            w[i] = k[i] * du;
        }
        break;
    }
    }
    for (std::size_t i = 0; i < n; ++i) om[i] = dispersion_value(spec.dispersion, k[i], spec.mass);
    const double support = std::max(dispersion_value(spec.dispersion, spec.k_min, spec.mass),
                                    dispersion_value(spec.dispersion, spec.k_max, spec.mass));
    return ModeGrid(std::move(k), std::move(w), std::move(om), support);
}

std::string FormFactorRule::label() const {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << coefficient << "*k^" << -exponent;
    return os.str();
}

FormFactor make_form_factor(const FormFactorRule& rule, const ModeGrid& grid) {
    FormFactor f;
    f.label = rule.label();
    f.values.reserve(grid.size());
    for (double k : grid.points()) f.values.emplace_back(rule.coefficient * std::pow(k, -rule.exponent), 0.0);
    check_form_factor(f, grid);
    return f;
}

void check_form_factor(const FormFactor& f, const ModeGrid& grid) {
    if (f.values.size() != grid.size())
        throw std::invalid_argument("form factor '" + f.label + "' does not match the grid size");
    for (const auto& v : f.values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("form factor '" + f.label + "' has non-finite entries");
}

Complex scale_inner(const FormFactor& f, const FormFactor& g, double s, const ModeGrid& grid) {
    check_form_factor(f, grid);
    check_form_factor(g, grid);
    const auto w = grid.weights();
    const auto om = grid.dispersion();
    Complex acc{};
    for (std::size_t i = 0; i < grid.size(); ++i)
        acc += w[i] * std::pow(om[i], s) * std::conj(f.values[i]) * g.values[i];
    return acc;
}

double scale_norm(const FormFactor& f, double s, const ModeGrid& grid) {
    check_form_factor(f, grid);
    const auto w = grid.weights();
    const auto om = grid.dispersion();
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) acc += w[i] * std::pow(om[i], s) * std::norm(f.values[i]);
    return std::sqrt(acc);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

DecayFit decay_exponent(const FormFactor& f, double s, const ModeGrid& grid, int n_max) {
    if (!(s > 1.0 && s <= 2.0)) throw std::invalid_argument("decay_exponent: s must lie in (1, 2]");
    if (n_max < 8) throw std::invalid_argument("decay_exponent: n_max must be >= 8");
    check_form_factor(f, grid);
    const auto w = grid.weights();
    const auto om = grid.dispersion();
    const double m = grid.mass_gap();
    DecayFit fit;
    fit.integrals.resize(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) {
        double acc = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            acc += w[i] * std::norm(f.values[i]) / std::pow(om[i] + (n - 1) * m, s);
        if (!(acc > 0.0)) throw std::invalid_argument("decay_exponent: I_n vanishes (trivial form factor)");
        fit.integrals[static_cast<std::size_t>(n - 1)] = acc;
    }
    std::vector<double> xs, ys;
    for (int n = n_max / 2; n <= n_max; ++n) {
        xs.push_back(static_cast<double>(n));
        ys.push_back(fit.integrals[static_cast<std::size_t>(n - 1)]);
    }
    fit.p_fit = loglog_slope(xs, ys);
    fit.r_star = std::min(1.0, s - fit.p_fit);
    fit.r_min = std::max(s - 1.0, s + fit.p_fit);
    return fit;
}

} // namespace sbren
