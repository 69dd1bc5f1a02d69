// twosector.hpp - block operators [[h_e, lam A], [lam A^dag, h_g]] on
// (C^{d_e} (x) F) + (C^{d_g} (x) F) and their Schur-complement resolvent

#pragma once

#include <string>
#include <vector>

#include "sbren/linalg.hpp"

namespace sbren {

/// A Hamiltonian together with the offsets of its blocks (size blocks + 1).
struct BlockHamiltonian {
    SparseMatrix matrix;
    std::vector<std::size_t> block_offsets;
    std::vector<std::string> block_labels;
};

struct TwoBlockState {
    CVector excited;
    CVector ground;

    CVector stacked() const;
    static TwoBlockState split(const CVector& v, std::size_t excited_dim);
};

/// h_g = E_g (x) I + I (x) dGamma on C^{d_g} (x) F. Resolvents use the
/// eigendecomposition of E_g, skipped when E_g is already diagonal.
class GroundBlock {
public:
    GroundBlock(const CMatrix& e_g, std::vector<double> fock_energies);

    std::size_t levels() const noexcept { return static_cast<std::size_t>(e_g_.rows()); }
    std::size_t dimension() const noexcept { return levels() * fock_.size(); }
    bool diagonal() const noexcept { return diagonal_; }

    SparseMatrix hamiltonian() const;
    /// (h_g - z)^{-1}; throws NumericalError if z hits an eigenvalue.
    SparseMatrix resolvent(Complex z) const;

private:
    CMatrix e_g_;
    std::vector<double> fock_;
    bool diagonal_{true};
    Eigen::VectorXd eigenvalues_;
    CMatrix eigenvectors_;
};

class TwoSectorSystem {
public:
    /// a maps the ground block to the excited block (rows: h_e, cols: h_g).
    TwoSectorSystem(SparseMatrix h_e, GroundBlock ground, SparseMatrix a, double lambda);

    std::size_t excited_dim() const noexcept { return static_cast<std::size_t>(h_e_.rows()); }
    std::size_t ground_dim() const noexcept { return ground_.dimension(); }
    double lambda() const noexcept { return lambda_; }
    const SparseMatrix& h_e() const noexcept { return h_e_; }
    const GroundBlock& ground() const noexcept { return ground_; }
    const SparseMatrix& coupling() const noexcept { return a_; }

    SparseMatrix assemble() const;

    /// S(z) = A (h_g - z)^{-1} A^dag on the excited block.
    SparseMatrix self_energy(Complex z) const;
    /// G(z) = h_e - z - lam^2 S(z).
    SparseMatrix propagator(Complex z) const;
    SolveResult propagator_solve(Complex z, const CVector& psi_e) const;

    /// (H - z)^{-1} psi by the Schur factorization: ground solve, feed through
    /// A into G(z)^{-1}, feed back through A^dag into the ground block.
    TwoBlockState resolvent_apply(Complex z, const TwoBlockState& psi, SolveReport* report = nullptr) const;

    /// -lam (h_g + 1)^{-1} A^dag phi_e
    CVector domain_shift(const CVector& phi_e) const;
    /// ((h_e - lam^2 S(-1)) phi_e + lam A phi_g, h_g phi_g + lam (h_g+1)^{-1} A^dag phi_e)
    TwoBlockState singular_action(const TwoBlockState& phi) const;
    TwoBlockState matrix_action(const TwoBlockState& psi) const;

private:
    SparseMatrix h_e_;
    GroundBlock ground_;
    SparseMatrix a_;
    double lambda_;
};

} // namespace sbren
