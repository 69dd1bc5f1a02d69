// gsbmodel.hpp - two-sector generalized spin-boson model
//
//   H = [[E_e (x) I + I (x) dGamma, lam A_f], [lam A_f^dag, E_g (x) I + I (x) dGamma]]
//   A_f = sum_j Sigma+_j (x) a(f_j)
//
// Blocks are level-major: excited level a occupies rows a*D .. (a+1)*D - 1.

#pragma once

#include <vector>

#include "sbren/fieldops.hpp"
#include "sbren/fock.hpp"
#include "sbren/modegrid.hpp"
#include "sbren/twosector.hpp"

namespace sbren {

namespace limits {
inline constexpr std::size_t gsb_level_cap = 16;
} // namespace limits

struct GsbChannel {
    CMatrix sigma_plus; // dim_e x dim_g
    FormFactor f;
};

struct GsbParams {
    CMatrix e_e; // dim_e x dim_e, Hermitian, nonnegative
    CMatrix e_g; // dim_g x dim_g, Hermitian, nonnegative
    std::vector<GsbChannel> channels;
    double lambda{0.0};
    /// Experimental: adds lam^2 sum_{j,l} <f_j, f_l>_{-1} Sigma+_j Sigma-_l to
    /// E_e, treating e_e as dressed. Not a construction taken from the theory.
    bool experimental_counterterm{false};

    std::size_t dim_e() const noexcept { return static_cast<std::size_t>(e_e.rows()); }
    std::size_t dim_g() const noexcept { return static_cast<std::size_t>(e_g.rows()); }
};

/// Throws std::invalid_argument on shape, symmetry or sign violations.
void validate(const GsbParams& p, const ModeGrid& grid);

/// The matrix lam^2 sum_{j,l} <f_j, f_l>_{-1} Sigma+_j Sigma-_l.
CMatrix gsb_counterterm(const GsbParams& p, const ModeGrid& grid);

class GsbModel {
public:
    GsbModel(GsbParams params, const ModeGrid& grid, const FockBasis& basis);

    const GsbParams& params() const noexcept { return params_; }
    const TwoSectorSystem& system() const noexcept { return system_; }
    std::size_t fock_dim() const noexcept { return fock_dim_; }
    /// E_e after the optional experimental counterterm.
    const CMatrix& effective_e_e() const noexcept { return e_e_eff_; }

    BlockHamiltonian assemble() const;
    SparseMatrix sigma(Complex z) const { return system_.self_energy(z); }
    TwoBlockState resolvent_apply(Complex z, const TwoBlockState& psi, SolveReport* report = nullptr) const {
        return system_.resolvent_apply(z, psi, report);
    }
    CVector domain_shift(const CVector& phi_e) const { return system_.domain_shift(phi_e); }
    TwoBlockState singular_action(const TwoBlockState& phi) const { return system_.singular_action(phi); }

private:
    GsbParams params_;
    CMatrix e_e_eff_;
    std::size_t fock_dim_;
    TwoSectorSystem system_;
};

BlockHamiltonian assemble_gsb(const GsbParams& p, const ModeGrid& grid, const FockBasis& basis);
SparseMatrix gsb_sigma(Complex z, const GsbParams& p, const ModeGrid& grid, const FockBasis& basis);

struct GsbActionCheck {
    TwoBlockState action;       // the singular action formula
    double max_relative_defect; // against the matrix on the domain-shifted vector
};

/// Evaluates the singular action on (phi_e, phi_g) and compares it with the
/// plain matrix applied to (phi_e, phi_g - lam (h_g+1)^{-1} A^dag phi_e).
GsbActionCheck gsb_singular_action(const TwoBlockState& phi, const GsbParams& p, const ModeGrid& grid,
                                   const FockBasis& basis);

} // namespace sbren
