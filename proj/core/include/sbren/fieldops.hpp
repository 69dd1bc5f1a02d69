// fieldops.hpp - dGamma(omega), a(f), a^dag(f) as sparse matrices on a
// truncated Fock basis
//
// Basis convention: each quadrature cell i is an orthonormal mode with
// ladder operator b_i, and a(f) = sum_i sqrt(w_i) conj(f_i) b_i. Then
// [a(f), a^dag(g)] = sum_i w_i conj(f_i) g_i, a^dag(f) is the plain conjugate
// transpose of a(f), and the Fock inner product is the Euclidean one.

#pragma once

#include <cstdint>
#include <iosfwd>

#include "sbren/fock.hpp"
#include "sbren/linalg.hpp"
#include "sbren/modegrid.hpp"

namespace sbren {

struct FieldOperator {
    SparseMatrix matrix;
    int sector_shift{0}; // -1 for a(f), +1 for a^dag(f), 0 for dGamma
};

FieldOperator dgamma(const ModeGrid& grid, const FockBasis& basis);
FieldOperator annihilator(const FormFactor& f, const ModeGrid& grid, const FockBasis& basis);
/// Conjugate transpose of annihilator(f); the top sector n_max is mapped to 0.
FieldOperator creator(const FormFactor& f, const ModeGrid& grid, const FockBasis& basis);

/// Removes explicitly stored zeros and compresses.
void drop_zeros(SparseMatrix& m);

struct ScaleNormOptions {
    std::size_t iterations{200};
    std::uint64_t seed{7};
};

/// Power-iteration estimate of sup ||A psi||_{F_{s_out}} / ||psi||_{F_{s_in}}
/// over the truncated space; best of `trials` random starts.
double operator_scale_norm(const FieldOperator& a, double s_in, double s_out, const ModeGrid& grid,
                           const FockBasis& basis, std::size_t trials, ScaleNormOptions options = {});

/// Triplet dump, one "row col re im" line per stored entry in row order.
void write_triplets(std::ostream& out, const SparseMatrix& m);

} // namespace sbren
