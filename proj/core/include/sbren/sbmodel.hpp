// sbmodel.hpp - rotating-wave spin-boson model
//
//   H = [[omega_e + dGamma, lam a(f)], [lam a^dag(f), omega_g + dGamma]]
//
// with the excited block first. Renormalized parameters carry the dressed
// energy; the bare one is omega_e = dressed + lam^2 c(f), see
// counterterm_integral.

#pragma once

#include "sbren/fieldops.hpp"
#include "sbren/fock.hpp"
#include "sbren/modegrid.hpp"
#include "sbren/twosector.hpp"

namespace sbren {

/// Where the counterterm c(f) is anchored:
///   norm_minus_one:         c = ||f||_{-1}^2 = sum w |f|^2 / omega
///   resolvent_at_minus_one: c = <Omega, S_f(-1) Omega> = sum w |f|^2 / (omega_g + omega + 1)
enum class CountertermAnchor { norm_minus_one, resolvent_at_minus_one };

std::string to_string(CountertermAnchor anchor);
CountertermAnchor parse_anchor(const std::string& name);

double counterterm_integral(const FormFactor& f, const ModeGrid& grid, CountertermAnchor anchor,
                            double omega_g = 0.0);

struct SpinBosonParams {
    double omega_e{1.0};
    double omega_g{0.0};
    double lambda{0.0};
    FormFactor f;
    bool renormalized{false}; // omega_e holds the dressed energy
    CountertermAnchor anchor{CountertermAnchor::norm_minus_one};
};

struct EnergyStats {
    double mean{0.0};
    double variance{0.0};
};

class SpinBoson {
public:
    SpinBoson(SpinBosonParams params, const ModeGrid& grid, const FockBasis& basis);

    const SpinBosonParams& params() const noexcept { return params_; }
    /// Excited energy actually placed in the matrix.
    double bare_omega_e() const noexcept { return bare_omega_e_; }
    std::size_t fock_dim() const noexcept { return system_.excited_dim(); }
    const TwoSectorSystem& system() const noexcept { return system_; }
    const SparseMatrix& annihilator() const noexcept { return system_.coupling(); }

    BlockHamiltonian assemble() const;

    /// Mean and variance of H in Psi_0 = (Omega, 0).
    EnergyStats psi0_energy_stats() const;

    SparseMatrix sigma(Complex z) const { return system_.self_energy(z); }
    SparseMatrix propagator(Complex z) const { return system_.propagator(z); }
    SolveResult propagator_inverse_apply(Complex z, const CVector& psi_e) const {
        return system_.propagator_solve(z, psi_e);
    }
    TwoBlockState resolvent_apply(Complex z, const TwoBlockState& psi, SolveReport* report = nullptr) const {
        return system_.resolvent_apply(z, psi, report);
    }
    CVector domain_shift(const CVector& phi_e) const { return system_.domain_shift(phi_e); }
    TwoBlockState singular_action(const TwoBlockState& phi) const { return system_.singular_action(phi); }

private:
    SpinBosonParams params_;
    double bare_omega_e_;
    TwoSectorSystem system_;
};

BlockHamiltonian assemble_regular(const SpinBosonParams& p, const ModeGrid& grid, const FockBasis& basis);

/// Regular assembly with the bare energy dressed + lam^2 c(f^Lambda).
BlockHamiltonian assemble_singular(const SpinBosonParams& p, const ModeGrid& grid, const FockBasis& basis);

EnergyStats psi0_energy_stats(const SpinBosonParams& p, const ModeGrid& grid, const FockBasis& basis);

/// Scalar single-excitation reduction:
///   <Omega, G(z)^{-1} Omega> = 1 / (omega_e - z - lam^2 sum_i w_i |f_i|^2 / (omega_g + omega_i - z))
Complex friedrichs_vacuum_element(Complex z, double omega_e, double omega_g, double lambda, const FormFactor& f,
                                  const ModeGrid& grid);

} // namespace sbren
