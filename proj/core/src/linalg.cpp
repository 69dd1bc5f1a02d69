#include "sbren/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

namespace sbren {

namespace {

using ColSparse = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;

ColSparse shifted_colmajor(const SparseMatrix& a, Complex shift) {
    ColSparse m = a;
    if (shift != Complex{0.0, 0.0}) {
        ColSparse id(m.rows(), m.cols());
        id.setIdentity();
        m = m - shift * id;
    }
    m.makeCompressed();
    return m;
}

double relative(double num, double den) { return den > 0.0 ? num / den : num; }

} // namespace

SparseMatrix sparse_from_triplets(std::size_t rows, std::size_t cols,
                                  const std::vector<Triplet>& triplets) {
    SparseMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
}

SparseMatrix sparse_identity(std::size_t n) {
    SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    m.setIdentity();
    m.makeCompressed();
    return m;
}

SparseMatrix sparse_diagonal(const CVector& diag) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(diag.size()));
    for (Eigen::Index i = 0; i < diag.size(); ++i)
        if (diag[i] != Complex{}) t.emplace_back(i, i, diag[i]);
    return sparse_from_triplets(diag.size(), diag.size(), t);
}

double shifted_residual(const SparseMatrix& a, Complex shift, const CVector& x, const CVector& b) {
    CVector r = a * x - shift * x - b;
    return relative(r.norm(), b.norm());
}

struct ShiftedSolver::Impl {
    ColSparse matrix;
    SolveOptions options;
    bool direct{true};
    Eigen::SparseLU<ColSparse> lu;
    Eigen::GMRES<ColSparse, Eigen::DiagonalPreconditioner<Complex>> gmres;
};

ShiftedSolver::ShiftedSolver(const SparseMatrix& a, Complex shift, SolveOptions options)
    : impl_(std::make_unique<Impl>()), dim_(static_cast<std::size_t>(a.rows())) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("ShiftedSolver: matrix must be square");
    impl_->matrix = shifted_colmajor(a, shift);
    impl_->options = options;
    impl_->direct = dim_ <= options.lu_dimension_cap;
    if (impl_->direct) {
        impl_->lu.analyzePattern(impl_->matrix);
        impl_->lu.factorize(impl_->matrix);
        if (impl_->lu.info() != Eigen::Success) {
            SolveReport rep{"sparse-lu", dim_, 0, std::nan(""), false};
            throw NumericalError("sparse LU factorization failed (singular shifted operator): " +
                                     impl_->lu.lastErrorMessage(),
                                 rep);
        }
    } else {
        impl_->gmres.set_restart(static_cast<int>(options.krylov_restart));
        impl_->gmres.setMaxIterations(static_cast<Eigen::Index>(options.krylov_max_iterations));
        impl_->gmres.setTolerance(options.tolerance * 0.1);
        impl_->gmres.compute(impl_->matrix);
    }
}

ShiftedSolver::~ShiftedSolver() = default;
ShiftedSolver::ShiftedSolver(ShiftedSolver&&) noexcept = default;
ShiftedSolver& ShiftedSolver::operator=(ShiftedSolver&&) noexcept = default;

bool ShiftedSolver::uses_direct() const noexcept { return impl_->direct; }

SolveResult ShiftedSolver::solve(const CVector& b) const {
    if (static_cast<std::size_t>(b.size()) != dim_)
        throw std::invalid_argument("ShiftedSolver::solve: right-hand side has wrong length");
    SolveResult out;
    out.report.dimension = dim_;
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        out.x = CVector::Zero(b.size());
        out.report = {impl_->direct ? "sparse-lu" : "gmres", dim_, 0, 0.0, true};
        return out;
    }
    const auto& m = impl_->matrix;
    if (impl_->direct) {
        out.report.method = "sparse-lu";
        out.x = impl_->lu.solve(b);
        CVector r = b - m * out.x;
        double res = r.norm() / bnorm;
        std::size_t steps = 0;
        while (res > impl_->options.tolerance && steps < impl_->options.max_refinements) {
            out.x += impl_->lu.solve(r);
            r = b - m * out.x;
            res = r.norm() / bnorm;
            ++steps;
        }
        out.report.iterations = steps;
        out.report.residual = res;
    } else {
        out.report.method = "gmres";
        out.x = impl_->gmres.solve(b);
        out.report.iterations = static_cast<std::size_t>(impl_->gmres.iterations());
        out.report.residual = (b - m * out.x).norm() / bnorm;
    }
    out.report.success = std::isfinite(out.report.residual) &&
                         out.report.residual <= impl_->options.tolerance;
    if (!out.report.success)
        throw NumericalError("shifted solve not certified: relative residual " +
                                 std::to_string(out.report.residual),
                             out.report);
    return out;
}

SolveResult solve(const SparseMatrix& a, Complex shift, const CVector& b, SolveOptions options) {
    ShiftedSolver solver(a, shift, options);
    return solver.solve(b);
}

CMatrix dense_inverse_oracle(const CMatrix& a, std::size_t cap) {
    if (a.rows() != a.cols()) throw std::invalid_argument("dense_inverse_oracle: matrix must be square");
    if (static_cast<std::size_t>(a.rows()) > cap)
        throw SizingError("dense_inverse_oracle: dimension " + std::to_string(a.rows()) +
                          " exceeds oracle cap " + std::to_string(cap));
    Eigen::PartialPivLU<CMatrix> lu(a);
    if (!(lu.rcond() > 1e-15))
        throw NumericalError("dense_inverse_oracle: matrix is numerically singular");
    return lu.inverse();
}

double max_hermiticity_defect(const SparseMatrix& a) {
    SparseMatrix adj = a.adjoint();
    SparseMatrix diff = a - adj;
    double worst = 0.0;
    for (Eigen::Index k = 0; k < diff.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(diff, k); it; ++it)
            worst = std::max(worst, std::abs(it.value()));
    return worst;
}

} // namespace sbren
