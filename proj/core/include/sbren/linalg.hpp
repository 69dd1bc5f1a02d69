// linalg.hpp - sparse storage, certified shifted solves, dense oracle inverse

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "sbren/errors.hpp"

namespace sbren {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Compressed row storage. Columns within a row are sorted and unique once
/// the matrix is compressed (setFromTriplets merges duplicates by summation).
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<Complex>;

namespace limits {
inline constexpr std::size_t lu_dimension_cap = 20000;
inline constexpr std::size_t dense_oracle_cap = 4000;
inline constexpr double solve_tolerance = 1e-12;
} // namespace limits

struct SolveOptions {
    std::size_t lu_dimension_cap{limits::lu_dimension_cap};
    double tolerance{limits::solve_tolerance};
    std::size_t max_refinements{3};
    std::size_t krylov_restart{60};
    std::size_t krylov_max_iterations{20000};
};

struct SolveResult {
    CVector x;
    SolveReport report;
};

SparseMatrix sparse_from_triplets(std::size_t rows, std::size_t cols,
                                  const std::vector<Triplet>& triplets);
SparseMatrix sparse_identity(std::size_t n);
SparseMatrix sparse_diagonal(const CVector& diag);

/// Relative residual ||(A - shift I) x - b|| / ||b||.
double shifted_residual(const SparseMatrix& a, Complex shift, const CVector& x, const CVector& b);

/// Factorizes A - shift*I once and solves many right-hand sides. Every
/// solution is certified against its own residual; failures throw
/// NumericalError carrying the SolveReport.
class ShiftedSolver {
public:
    ShiftedSolver(const SparseMatrix& a, Complex shift, SolveOptions options = {});
    ~ShiftedSolver();
    ShiftedSolver(ShiftedSolver&&) noexcept;
    ShiftedSolver& operator=(ShiftedSolver&&) noexcept;

    SolveResult solve(const CVector& b) const;
    std::size_t dimension() const noexcept { return dim_; }
    bool uses_direct() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::size_t dim_{0};
};

/// Solves (A - shift I) x = b: sparse LU below the dimension cap, restarted
/// GMRES with a diagonal preconditioner above it.
SolveResult solve(const SparseMatrix& a, Complex shift, const CVector& b, SolveOptions options = {});

/// LU-based dense inverse. Oracle use only; rejects dimensions above the cap.
CMatrix dense_inverse_oracle(const CMatrix& a, std::size_t cap = limits::dense_oracle_cap);

double max_hermiticity_defect(const SparseMatrix& a);

// ---------------------------------------------------------------------------
// Block tridiagonal systems

/// Square block tridiagonal operator. upper[s] couples block s (rows) to
/// block s+1 (columns); lower[s] couples block s+1 to block s.
struct BlockTridiagonal {
    std::vector<SparseMatrix> diagonal;
    std::vector<SparseMatrix> upper;
    std::vector<SparseMatrix> lower;

    std::size_t block_count() const noexcept { return diagonal.size(); }
    std::size_t dimension() const;
    std::vector<std::size_t> offsets() const;
    SparseMatrix assemble() const;
    void validate() const;
};

/// Block Thomas elimination of T - shift*I. Schur complements are dense;
/// each pivot block is LU factorized once and checked for conditioning.
class BlockThomasSolver {
public:
    BlockThomasSolver(const BlockTridiagonal& system, Complex shift, double min_rcond = 1e-14);

    SolveResult solve(const CVector& b) const;

private:
    const BlockTridiagonal* system_;
    Complex shift_;
    std::vector<std::size_t> offsets_;
    std::vector<Eigen::PartialPivLU<CMatrix>> pivots_;
    std::vector<CMatrix> pivot_inv_upper_; // pivot_s^{-1} upper_s
};

// ---------------------------------------------------------------------------
// Spectra

struct EigenOptions {
    std::size_t max_krylov{400};
    double tolerance{1e-10};
    std::uint64_t seed{20240601};
};

struct EigenResult {
    std::vector<double> values;
    CMatrix vectors;
    std::vector<double> residuals;
    double max_imaginary_ritz{0.0};
    std::size_t krylov_dimension{0};
    bool converged{false};
};

/// Smallest eigenpairs of a Hermitian operator by Lanczos with full
/// reorthogonalization. Non-convergence is reported, not thrown.
EigenResult lowest_eigenpairs(const SparseMatrix& a, std::size_t count, EigenOptions options = {});

} // namespace sbren
