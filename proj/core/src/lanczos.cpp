#include "sbren/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sbren {

namespace {

CVector random_unit(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = Complex(g(rng), g(rng));
    return v / v.norm();
}

// two passes of classical Gram-Schmidt against the first `cols` basis vectors
void reorthogonalize(CVector& w, const CMatrix& basis, Eigen::Index cols) {
    for (int pass = 0; pass < 2; ++pass) {
        const CVector proj = basis.leftCols(cols).adjoint() * w;
        w.noalias() -= basis.leftCols(cols) * proj;
    }
}

} // namespace

EigenResult lowest_eigenpairs(const SparseMatrix& a, std::size_t count, EigenOptions options) {
    if (a.rows() != a.cols()) throw std::invalid_argument("lowest_eigenpairs: matrix must be square");
    const Eigen::Index n = a.rows();
    EigenResult out;
    if (n == 0 || count == 0) {
        out.converged = true;
        return out;
    }
    const auto want = static_cast<Eigen::Index>(std::min<std::size_t>(count, static_cast<std::size_t>(n)));
    const Eigen::Index cap = std::min<Eigen::Index>(n, static_cast<Eigen::Index>(std::max<std::size_t>(options.max_krylov, count)));
    Eigen::Index target = std::min<Eigen::Index>(cap, std::max<Eigen::Index>(4 * want + 40, 60));

    std::mt19937_64 rng(options.seed);
    CMatrix basis(n, cap + 1);
    std::vector<double> alpha, beta;
    basis.col(0) = random_unit(n, rng);
    Eigen::Index built = 0;
    double scale = 0.0;

    while (true) {
        for (Eigen::Index j = built; j < target; ++j) {
            CVector w = a * basis.col(j);
            const Complex aj = basis.col(j).dot(w);
            out.max_imaginary_ritz = std::max(out.max_imaginary_ritz, std::abs(aj.imag()));
            alpha.push_back(aj.real());
            w -= aj.real() * basis.col(j);
            if (j > 0) w -= beta[static_cast<std::size_t>(j - 1)] * basis.col(j - 1);
            reorthogonalize(w, basis, j + 1);
            double bj = w.norm();
            scale = std::max({scale, std::abs(aj.real()), bj});
            if (j + 1 < n && bj <= 1e-12 * std::max(scale, 1.0)) {
                // invariant subspace found: continue in its orthogonal complement
                w = random_unit(n, rng);
                reorthogonalize(w, basis, j + 1);
                w /= w.norm();
                bj = 0.0;
                basis.col(j + 1) = w;
            } else if (j + 1 < n) {
                basis.col(j + 1) = w / bj;
            }
            beta.push_back(bj);
        }
        built = target;

        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(built, built);
        for (Eigen::Index i = 0; i < built; ++i) {
            t(i, i) = alpha[static_cast<std::size_t>(i)];
            if (i + 1 < built) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        const Eigen::Index k = std::min(want, built);
        out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
        out.vectors = basis.leftCols(built) * es.eigenvectors().leftCols(k).cast<Complex>();
        out.residuals.assign(static_cast<std::size_t>(k), 0.0);
        bool ok = true;
        for (Eigen::Index i = 0; i < k; ++i) {
            out.vectors.col(i).normalize();
            const double r = (a * out.vectors.col(i) - out.values[static_cast<std::size_t>(i)] * out.vectors.col(i)).norm();
            out.residuals[static_cast<std::size_t>(i)] = r;
            if (r > options.tolerance * std::max(1.0, std::abs(out.values[static_cast<std::size_t>(i)]))) ok = false;
        }
        out.krylov_dimension = static_cast<std::size_t>(built);
        out.converged = ok && k == want;
        if (out.converged || built >= cap) break;
        target = std::min<Eigen::Index>(cap, 2 * built);
    }
    return out;
}

} // namespace sbren
