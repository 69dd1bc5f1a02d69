#include "sbren/fieldops.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

namespace sbren {

namespace {

void require_compatible(const ModeGrid& grid, const FockBasis& basis) {
    if (grid.size() != basis.modes())
        throw std::invalid_argument("field operator: grid has " + std::to_string(grid.size()) +
                                    " modes but the basis has " + std::to_string(basis.modes()));
}

CVector random_vector(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CVector v(static_cast<Eigen::Index>(n));
    for (auto& x : v) x = Complex{g(rng), g(rng)};
    return v;
}

} // namespace

void drop_zeros(SparseMatrix& m) {
    m.prune([](Eigen::Index, Eigen::Index, const Complex& v) { return v != Complex{}; });
    m.makeCompressed();
}

FieldOperator dgamma(const ModeGrid& grid, const FockBasis& basis) {
    require_compatible(grid, basis);
    const auto e = free_energies(grid, basis);
    std::vector<Triplet> t;
    t.reserve(e.size());
    for (std::size_t k = 0; k < e.size(); ++k)
        if (e[k] != 0.0) t.emplace_back(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k), e[k]);
    return {sparse_from_triplets(e.size(), e.size(), t), 0};
}

FieldOperator annihilator(const FormFactor& f, const ModeGrid& grid, const FockBasis& basis) {
    require_compatible(grid, basis);
    check_form_factor(f, grid);
    const auto w = grid.weights();
    std::vector<Complex> amp(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) amp[i] = std::sqrt(w[i]) * std::conj(f.values[i]);

    std::vector<Triplet> t;
    std::vector<std::uint32_t> scratch;
    const auto off = basis.sector_offsets();
    for (std::size_t col = off[1]; col < basis.dimension(); ++col) {
        const auto v = basis.modes_of(col);
        for (std::size_t p = 0; p < v.size();) {
            // run of equal modes: occupation n_i = run length
            std::size_t q = p;
            while (q < v.size() && v[q] == v[p]) ++q;
            const auto mode = v[p];
            if (amp[mode] != Complex{}) {
                scratch.assign(v.begin(), v.end());
                scratch.erase(scratch.begin() + static_cast<std::ptrdiff_t>(p));
                const auto row = basis.index_of(scratch);
                t.emplace_back(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col),
                               std::sqrt(static_cast<double>(q - p)) * amp[mode]);
            }
            p = q;
        }
    }
    return {sparse_from_triplets(basis.dimension(), basis.dimension(), t), -1};
}

FieldOperator creator(const FormFactor& f, const ModeGrid& grid, const FockBasis& basis) {
    SparseMatrix a = annihilator(f, grid, basis).matrix.adjoint();
    a.makeCompressed();
    return {std::move(a), +1};
}

double operator_scale_norm(const FieldOperator& a, double s_in, double s_out, const ModeGrid& grid,
                           const FockBasis& basis, std::size_t trials, ScaleNormOptions options) {
    if (trials == 0) throw std::invalid_argument("operator_scale_norm: trials must be >= 1");
    const auto n = basis.dimension();
    if (static_cast<std::size_t>(a.matrix.rows()) != n || static_cast<std::size_t>(a.matrix.cols()) != n)
        throw std::invalid_argument("operator_scale_norm: operator does not match the basis");
    const auto e = free_energies(grid, basis);
    Eigen::VectorXd din(static_cast<Eigen::Index>(n)), dout(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        din[static_cast<Eigen::Index>(k)] = std::pow(1.0 + e[k], -0.5 * s_in);
        dout[static_cast<Eigen::Index>(k)] = std::pow(1.0 + e[k], 0.5 * s_out);
    }
    // B = D_out A D_in^{-1}; iterate on B^H B
    auto apply_b = [&](const CVector& x) -> CVector { return dout.cwiseProduct(a.matrix * din.cwiseProduct(x)); };
    auto apply_bh = [&](const CVector& y) -> CVector {
        return din.cwiseProduct(a.matrix.adjoint() * dout.cwiseProduct(y));
    };
    std::mt19937_64 rng(options.seed);
    double best = 0.0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        CVector x = random_vector(n, rng);
        x.normalize();
        double est = 0.0;
        for (std::size_t it = 0; it < options.iterations; ++it) {
            CVector y = apply_bh(apply_b(x));
            const double nrm = y.norm();
            if (nrm == 0.0) {
                est = 0.0;
                break;
            }
            x = y / nrm;
            est = apply_b(x).norm();
        }
        best = std::max(best, est);
    }
    return best;
}

void write_triplets(std::ostream& out, const SparseMatrix& m) {
    char buf[64];
    auto put = [&](double v) {
        auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
        out.write(buf, r.ptr - buf);
    };
    for (Eigen::Index k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            out << it.row() << ' ' << it.col() << ' ';
            put(it.value().real());
            out << ' ';
            put(it.value().imag());
            out << '\n';
        }
}

} // namespace sbren
