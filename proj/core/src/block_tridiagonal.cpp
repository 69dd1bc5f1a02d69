#include "sbren/linalg.hpp"

#include <cmath>
#include <string>

namespace sbren {

std::size_t BlockTridiagonal::dimension() const {
    std::size_t n = 0;
    for (const auto& d : diagonal) n += static_cast<std::size_t>(d.rows());
    return n;
}

std::vector<std::size_t> BlockTridiagonal::offsets() const {
    std::vector<std::size_t> off(diagonal.size() + 1, 0);
    for (std::size_t s = 0; s < diagonal.size(); ++s)
        off[s + 1] = off[s] + static_cast<std::size_t>(diagonal[s].rows());
    return off;
}

void BlockTridiagonal::validate() const {
    const std::size_t k = diagonal.size();
    if (k == 0) throw std::invalid_argument("BlockTridiagonal: no blocks");
    if (upper.size() + 1 != k || lower.size() + 1 != k)
        throw std::invalid_argument("BlockTridiagonal: need K-1 upper and lower blocks");
    for (std::size_t s = 0; s < k; ++s)
        if (diagonal[s].rows() != diagonal[s].cols())
            throw std::invalid_argument("BlockTridiagonal: diagonal block " + std::to_string(s) +
                                        " is not square");
    for (std::size_t s = 0; s + 1 < k; ++s) {
        if (upper[s].rows() != diagonal[s].rows() || upper[s].cols() != diagonal[s + 1].rows())
            throw std::invalid_argument("BlockTridiagonal: upper block shape mismatch at " +
                                        std::to_string(s));
        if (lower[s].rows() != diagonal[s + 1].rows() || lower[s].cols() != diagonal[s].rows())
            throw std::invalid_argument("BlockTridiagonal: lower block shape mismatch at " +
                                        std::to_string(s));
    }
}

SparseMatrix BlockTridiagonal::assemble() const {
    validate();
    const auto off = offsets();
    std::vector<Triplet> t;
    auto place = [&](const SparseMatrix& m, std::size_t r0, std::size_t c0) {
        for (Eigen::Index k = 0; k < m.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(m, k); it; ++it)
                t.emplace_back(static_cast<Eigen::Index>(r0) + it.row(),
                               static_cast<Eigen::Index>(c0) + it.col(), it.value());
    };
    for (std::size_t s = 0; s < diagonal.size(); ++s) {
        place(diagonal[s], off[s], off[s]);
        if (s + 1 < diagonal.size()) {
            place(upper[s], off[s], off[s + 1]);
            place(lower[s], off[s + 1], off[s]);
        }
    }
    return sparse_from_triplets(off.back(), off.back(), t);
}

BlockThomasSolver::BlockThomasSolver(const BlockTridiagonal& system, Complex shift, double min_rcond)
    : system_(&system), shift_(shift), offsets_(system.offsets()) {
    system.validate();
    const std::size_t k = system.block_count();
    pivots_.reserve(k);
    pivot_inv_upper_.resize(k > 0 ? k - 1 : 0);
    for (std::size_t s = 0; s < k; ++s) {
        CMatrix pivot = CMatrix(system.diagonal[s]);
        pivot.diagonal().array() -= shift;
        if (s > 0) pivot.noalias() -= system.lower[s - 1] * pivot_inv_upper_[s - 1];
        pivots_.emplace_back(pivot);
        const double rc = pivots_.back().rcond();
        if (!(rc > min_rcond)) {
            SolveReport rep{"block-thomas", system.dimension(), 0, std::nan(""), false};
            throw NumericalError("block Thomas: pivot block " + std::to_string(s) +
                                     " is singular (rcond " + std::to_string(rc) + ")",
                                 rep);
        }
        if (s + 1 < k) pivot_inv_upper_[s] = pivots_.back().solve(CMatrix(system.upper[s]));
    }
}

SolveResult BlockThomasSolver::solve(const CVector& b) const {
    const auto& sys = *system_;
    const std::size_t k = sys.block_count();
    const auto dim = offsets_.back();
    if (static_cast<std::size_t>(b.size()) != dim)
        throw std::invalid_argument("BlockThomasSolver::solve: right-hand side has wrong length");
    auto seg = [&](const CVector& v, std::size_t s) {
        return v.segment(static_cast<Eigen::Index>(offsets_[s]),
                         static_cast<Eigen::Index>(offsets_[s + 1] - offsets_[s]));
    };

    std::vector<CVector> g(k);
    for (std::size_t s = 0; s < k; ++s) {
        CVector y = seg(b, s);
        if (s > 0) y.noalias() -= sys.lower[s - 1] * g[s - 1];
        g[s] = pivots_[s].solve(y);
    }
    CVector x(dim);
    CVector next;
    for (std::size_t s = k; s-- > 0;) {
        CVector xs = g[s];
        if (s + 1 < k) xs.noalias() -= pivot_inv_upper_[s] * next;
        x.segment(static_cast<Eigen::Index>(offsets_[s]), xs.size()) = xs;
        next = std::move(xs);
    }

    // certify blockwise without assembling the full operator
    double rnorm2 = 0.0;
    for (std::size_t s = 0; s < k; ++s) {
        CVector r = sys.diagonal[s] * seg(x, s) - shift_ * seg(x, s) - seg(b, s);
        if (s + 1 < k) r.noalias() += sys.upper[s] * seg(x, s + 1);
        if (s > 0) r.noalias() += sys.lower[s - 1] * seg(x, s - 1);
        rnorm2 += r.squaredNorm();
    }
    SolveResult out;
    out.x = std::move(x);
    const double bn = b.norm();
    out.report = {"block-thomas", dim, 0, bn > 0 ? std::sqrt(rnorm2) / bn : std::sqrt(rnorm2), true};
    out.report.success = std::isfinite(out.report.residual) &&
                         out.report.residual <= limits::solve_tolerance;
    if (!out.report.success)
        throw NumericalError("block Thomas solve not certified: relative residual " +
                                 std::to_string(out.report.residual),
                             out.report);
    return out;
}

} // namespace sbren
