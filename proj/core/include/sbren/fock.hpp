// fock.hpp - symmetric Fock space truncated at total boson number n_max

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sbren/linalg.hpp"
#include "sbren/modegrid.hpp"

namespace sbren {

namespace limits {
inline constexpr std::size_t fock_dimension_cap = 5'000'000;
} // namespace limits

/// Occupation-number basis. A state with n bosons is stored as its sorted
/// list of mode indices (i_1 <= ... <= i_n), which is the same information as
/// the occupation vector. States are sector-major (by n) and, inside a
/// sector, lexicographic in that sorted list; equivalently, reverse
/// lexicographic in the occupation vector (n_1, ..., n_M).
class FockBasis {
public:
    FockBasis(std::size_t modes, std::size_t n_max, std::size_t cap = limits::fock_dimension_cap);

    std::size_t modes() const noexcept { return modes_; }
    std::size_t n_max() const noexcept { return n_max_; }
    std::size_t dimension() const noexcept { return dimension_; }

    /// sector_offsets()[n] is the first index with n bosons; size n_max + 2.
    std::span<const std::size_t> sector_offsets() const noexcept { return offsets_; }
    std::size_t sector_of(std::size_t index) const;

    /// Sorted mode-index list of a state; length equals its boson number.
    std::span<const std::uint32_t> modes_of(std::size_t index) const;
    std::vector<std::uint32_t> occupation(std::size_t index) const;

    /// Rank of a sorted mode list (inverse of modes_of). Throws if the list
    /// is unsorted, out of range, or longer than n_max.
    std::size_t index_of(std::span<const std::uint32_t> sorted_modes) const;
    std::size_t index_of_occupation(std::span<const std::uint32_t> occupation) const;

    bool operator==(const FockBasis& other) const noexcept {
        return modes_ == other.modes_ && n_max_ == other.n_max_;
    }

private:
    std::uint64_t binom(std::size_t n, std::size_t k) const;

    std::size_t modes_;
    std::size_t n_max_;
    std::size_t dimension_{0};
    std::vector<std::size_t> offsets_;
    std::vector<std::uint64_t> pascal_;     // C(n, k) for k <= n_max + 1, row-major
    std::vector<std::uint32_t> flat_modes_; // concatenated mode lists
    std::vector<std::size_t> flat_offsets_; // start of each state's list
};

/// Number of states with total boson number <= n_max, or cap + 1 if it
/// exceeds cap.
std::size_t fock_dimension(std::size_t modes, std::size_t n_max, std::size_t cap = limits::fock_dimension_cap);

struct FockState {
    const FockBasis* basis{nullptr};
    CVector coeffs;
};

CVector vacuum(const FockBasis& basis);

/// Diagonal of dGamma(omega): sum_j n_j omega_j per basis state.
std::vector<double> free_energies(const ModeGrid& grid, const FockBasis& basis);

/// ||(dGamma(omega) + 1)^{s/2} psi||.
double fock_scale_norm(const CVector& psi, double s, const ModeGrid& grid, const FockBasis& basis);

/// Text dump: one line per nonzero coefficient, "n_1 ... n_M re im".
void write_state(std::ostream& out, const FockBasis& basis, const CVector& psi);
CVector read_state(std::istream& in, const FockBasis& basis);

} // namespace sbren
