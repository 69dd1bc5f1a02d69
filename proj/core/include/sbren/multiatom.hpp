// multiatom.hpp - N two-level atoms coupled to one boson field
//
// Spin configurations are bitmasks, bit l-1 set meaning atom l is excited.
// Sector blocks run from j = N excited atoms down to j = 0; inside a sector
// masks are ascending. For N = 2 the order is [ee | eg, ge | gg] with
// eg = atom 1 excited.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sbren/fieldops.hpp"
#include "sbren/fock.hpp"
#include "sbren/modegrid.hpp"
#include "sbren/twosector.hpp"

namespace sbren {

namespace limits {
inline constexpr std::size_t atom_cap = 12;
} // namespace limits

struct SectorMap {
    std::size_t atoms{0};
    /// sectors[s] holds the masks with N - s excited atoms.
    std::vector<std::vector<std::uint32_t>> sectors;

    std::size_t excitations(std::size_t s) const noexcept { return atoms - s; }
    std::vector<std::size_t> sizes_by_excitation() const; // n_j for j = 0..N
    std::size_t position(std::uint32_t mask) const;       // index inside its sector
};

SectorMap sector_map(std::size_t atoms);

struct MultiAtomParams {
    std::vector<double> omega_e;  // per atom
    std::vector<double> omega_g;  // per atom
    std::vector<FormFactor> f;    // per atom
    double lambda{0.0};
    /// Optional Hermitian n_j x n_j blocks acting within sector j (indexed by j).
    std::vector<std::optional<CMatrix>> spin_spin;

    std::size_t atoms() const noexcept { return omega_e.size(); }
};

void validate(const MultiAtomParams& p, const ModeGrid& grid);

class MultiAtomModel {
public:
    MultiAtomModel(MultiAtomParams params, const ModeGrid& grid, const FockBasis& basis);

    const SectorMap& sectors() const noexcept { return map_; }
    std::size_t fock_dim() const noexcept { return fock_dim_; }
    /// Sector blocks s = 0..N (j = N - s), each of size n_j * D.
    const BlockTridiagonal& blocks() const noexcept { return blocks_; }
    BlockHamiltonian assemble() const;

private:
    MultiAtomParams params_;
    SectorMap map_;
    std::size_t fock_dim_;
    BlockTridiagonal blocks_;
};

BlockHamiltonian assemble_multi(const MultiAtomParams& p, const ModeGrid& grid, const FockBasis& basis);

/// (H - z)^{-1} psi by block Thomas elimination across the N + 1 sectors.
SolveResult block_tridiag_resolvent(Complex z, const BlockTridiagonal& h, const CVector& psi);

} // namespace sbren
