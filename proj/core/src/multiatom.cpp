#include "sbren/multiatom.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace sbren {

std::vector<std::size_t> SectorMap::sizes_by_excitation() const {
    std::vector<std::size_t> n(atoms + 1, 0);
    for (std::size_t s = 0; s < sectors.size(); ++s) n[excitations(s)] = sectors[s].size();
    return n;
}

std::size_t SectorMap::position(std::uint32_t mask) const {
    const auto j = static_cast<std::size_t>(std::popcount(mask));
    if (j > atoms || mask >> atoms) throw std::out_of_range("SectorMap::position: mask out of range");
    const auto& sec = sectors[atoms - j];
    return static_cast<std::size_t>(std::lower_bound(sec.begin(), sec.end(), mask) - sec.begin());
}

SectorMap sector_map(std::size_t atoms) {
    if (atoms < 1 || atoms > limits::atom_cap)
        throw std::invalid_argument("sector_map: atom count must lie in [1, " + std::to_string(limits::atom_cap) + "]");
    SectorMap m;
    m.atoms = atoms;
    m.sectors.resize(atoms + 1);
    for (std::uint32_t mask = 0; mask < (1u << atoms); ++mask)
        m.sectors[atoms - static_cast<std::size_t>(std::popcount(mask))].push_back(mask);
    return m;
}

void validate(const MultiAtomParams& p, const ModeGrid& grid) {
    const auto n = p.atoms();
    if (n < 1 || n > limits::atom_cap) throw std::invalid_argument("multiatom: atom count out of range");
    if (p.omega_g.size() != n || p.f.size() != n)
        throw std::invalid_argument("multiatom: omega_e, omega_g and f need one entry per atom");
    for (std::size_t l = 0; l < n; ++l) {
        if (!std::isfinite(p.omega_e[l]) || !std::isfinite(p.omega_g[l]))
            throw std::invalid_argument("multiatom: atom energies must be finite");
        check_form_factor(p.f[l], grid);
    }
    if (!std::isfinite(p.lambda)) throw std::invalid_argument("multiatom: lambda must be finite");
    if (!p.spin_spin.empty() && p.spin_spin.size() != n + 1)
        throw std::invalid_argument("multiatom: spin_spin needs N + 1 entries (one per sector) or none");
    for (std::size_t j = 0; j < p.spin_spin.size(); ++j) {
        if (!p.spin_spin[j]) continue;
        const auto& k = *p.spin_spin[j];
        const auto nj = static_cast<Eigen::Index>(sector_map(n).sectors[n - j].size());
        if (k.rows() != nj || k.cols() != nj)
            throw std::invalid_argument("multiatom: spin_spin block for sector " + std::to_string(j) +
                                        " must be " + std::to_string(nj) + " x " + std::to_string(nj));
        if (!k.allFinite() || (k - k.adjoint()).cwiseAbs().maxCoeff() != 0.0)
            throw std::invalid_argument("multiatom: spin_spin block for sector " + std::to_string(j) +
                                        " must be finite and Hermitian");
    }
}

namespace {

BlockTridiagonal build_blocks(const MultiAtomParams& p, const SectorMap& map, const ModeGrid& grid,
                              const FockBasis& basis) {
    validate(p, grid);
    const auto n = p.atoms();
    const auto d = static_cast<Eigen::Index>(basis.dimension());
    const auto energies = free_energies(grid, basis);
    std::vector<SparseMatrix> ann;
    ann.reserve(n);
    for (std::size_t l = 0; l < n; ++l) ann.push_back(annihilator(p.f[l], grid, basis).matrix);

    BlockTridiagonal bt;
    for (std::size_t s = 0; s <= n; ++s) {
        const auto& sec = map.sectors[s];
        const auto size = static_cast<std::size_t>(sec.size()) * basis.dimension();
        std::vector<Triplet> t;
        for (std::size_t c = 0; c < sec.size(); ++c) {
            double atom_energy = 0.0;
            for (std::size_t l = 0; l < n; ++l) atom_energy += ((sec[c] >> l) & 1u) ? p.omega_e[l] : p.omega_g[l];
            const auto r0 = static_cast<Eigen::Index>(c) * d;
            for (Eigen::Index k = 0; k < d; ++k) t.emplace_back(r0 + k, r0 + k, atom_energy + energies[k]);
        }
        const std::size_t j = map.excitations(s);
        if (j < p.spin_spin.size() && p.spin_spin[j]) {
            const auto& kj = *p.spin_spin[j];
            for (Eigen::Index a = 0; a < kj.rows(); ++a)
                for (Eigen::Index b = 0; b < kj.cols(); ++b)
                    if (kj(a, b) != Complex{})
                        for (Eigen::Index k = 0; k < d; ++k) t.emplace_back(a * d + k, b * d + k, kj(a, b));
        }
        SparseMatrix diag = sparse_from_triplets(size, size, t);
        drop_zeros(diag);
        bt.diagonal.push_back(std::move(diag));
    }
    for (std::size_t s = 0; s < n; ++s) {
        // block (mask c in sector s) -> (mask c without atom l in sector s+1): lam a(f_l)
        const auto& hi = map.sectors[s];
        const auto& lo = map.sectors[s + 1];
        std::vector<Triplet> t;
        if (p.lambda != 0.0) {
            for (std::size_t c = 0; c < hi.size(); ++c)
                for (std::size_t l = 0; l < n; ++l) {
                    if (!((hi[c] >> l) & 1u)) continue;
                    const auto target = map.position(hi[c] & ~(1u << l));
                    const auto r0 = static_cast<Eigen::Index>(c) * d;
                    const auto c0 = static_cast<Eigen::Index>(target) * d;
                    const auto& a = ann[l];
                    for (Eigen::Index k = 0; k < a.outerSize(); ++k)
                        for (SparseMatrix::InnerIterator it(a, k); it; ++it)
                            t.emplace_back(r0 + it.row(), c0 + it.col(), p.lambda * it.value());
                }
        }
        SparseMatrix up = sparse_from_triplets(hi.size() * basis.dimension(), lo.size() * basis.dimension(), t);
        drop_zeros(up);
        SparseMatrix down = up.adjoint();
        down.makeCompressed();
        bt.upper.push_back(std::move(up));
        bt.lower.push_back(std::move(down));
    }
    bt.validate();
    return bt;
}

} // namespace

MultiAtomModel::MultiAtomModel(MultiAtomParams params, const ModeGrid& grid, const FockBasis& basis)
    : params_(std::move(params)),
      map_(sector_map(params_.atoms())),
      fock_dim_(basis.dimension()),
      blocks_(build_blocks(params_, map_, grid, basis)) {}

BlockHamiltonian MultiAtomModel::assemble() const {
    BlockHamiltonian h;
    h.matrix = blocks_.assemble();
    drop_zeros(h.matrix);
    const auto n = map_.atoms;
    h.block_offsets.push_back(0);
    std::size_t off = 0;
    for (std::size_t s = 0; s <= n; ++s)
        for (auto mask : map_.sectors[s]) {
            off += fock_dim_;
            h.block_offsets.push_back(off);
            std::string label;
            for (std::size_t l = 0; l < n; ++l) label += ((mask >> l) & 1u) ? 'e' : 'g';
            h.block_labels.push_back(label);
        }
    return h;
}

BlockHamiltonian assemble_multi(const MultiAtomParams& p, const ModeGrid& grid, const FockBasis& basis) {
    return MultiAtomModel(p, grid, basis).assemble();
}

SolveResult block_tridiag_resolvent(Complex z, const BlockTridiagonal& h, const CVector& psi) {
    return BlockThomasSolver(h, z).solve(psi);
}

} // namespace sbren
