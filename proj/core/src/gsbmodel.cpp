#include "sbren/gsbmodel.hpp"

#include <cmath>
#include <stdexcept>

namespace sbren {

namespace {

void check_hermitian_nonnegative(const CMatrix& m, const char* name) {
    if (m.rows() == 0 || m.rows() != m.cols())
        throw std::invalid_argument(std::string("GSB: ") + name + " must be square and nonempty");
    if (static_cast<std::size_t>(m.rows()) > limits::gsb_level_cap)
        throw std::invalid_argument(std::string("GSB: ") + name + " exceeds the level cap");
    if (!m.allFinite()) throw std::invalid_argument(std::string("GSB: ") + name + " has non-finite entries");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() != 0.0)
        throw std::invalid_argument(std::string("GSB: ") + name + " must be Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-12 * scale)
        throw std::invalid_argument(std::string("GSB: ") + name + " must be nonnegative");
}

// sum_{a,b} M(a,b) |a><b| (x) op, placed into a (rows_levels*D) x (cols_levels*D) matrix
SparseMatrix kron(const CMatrix& m, const SparseMatrix& op) {
    const Eigen::Index d_r = op.rows(), d_c = op.cols();
    std::vector<Triplet> t;
    for (Eigen::Index a = 0; a < m.rows(); ++a)
        for (Eigen::Index b = 0; b < m.cols(); ++b) {
            if (m(a, b) == Complex{}) continue;
            for (Eigen::Index k = 0; k < op.outerSize(); ++k)
                for (SparseMatrix::InnerIterator it(op, k); it; ++it)
                    t.emplace_back(a * d_r + it.row(), b * d_c + it.col(), m(a, b) * it.value());
        }
    return sparse_from_triplets(static_cast<std::size_t>(m.rows() * d_r), static_cast<std::size_t>(m.cols() * d_c), t);
}

SparseMatrix excited_hamiltonian(const CMatrix& e_e, const std::vector<double>& energies) {
    const auto d = static_cast<Eigen::Index>(energies.size());
    std::vector<Triplet> t;
    for (Eigen::Index a = 0; a < e_e.rows(); ++a)
        for (Eigen::Index b = 0; b < e_e.cols(); ++b) {
            if (a == b) {
                for (Eigen::Index k = 0; k < d; ++k) t.emplace_back(a * d + k, a * d + k, e_e(a, a).real() + energies[k]);
            } else if (e_e(a, b) != Complex{}) {
                for (Eigen::Index k = 0; k < d; ++k) t.emplace_back(a * d + k, b * d + k, e_e(a, b));
            }
        }
    const auto n = static_cast<std::size_t>(e_e.rows() * d);
    SparseMatrix m = sparse_from_triplets(n, n, t);
    drop_zeros(m);
    return m;
}

} // namespace

void validate(const GsbParams& p, const ModeGrid& grid) {
    check_hermitian_nonnegative(p.e_e, "E_e");
    check_hermitian_nonnegative(p.e_g, "E_g");
    if (p.channels.empty()) throw std::invalid_argument("GSB: at least one channel is required");
    if (!std::isfinite(p.lambda)) throw std::invalid_argument("GSB: lambda must be finite");
    for (std::size_t j = 0; j < p.channels.size(); ++j) {
        const auto& ch = p.channels[j];
        if (static_cast<std::size_t>(ch.sigma_plus.rows()) != p.dim_e() ||
            static_cast<std::size_t>(ch.sigma_plus.cols()) != p.dim_g())
            throw std::invalid_argument("GSB: Sigma+ of channel " + std::to_string(j + 1) + " must be dim_e x dim_g");
        if (!ch.sigma_plus.allFinite())
            throw std::invalid_argument("GSB: Sigma+ of channel " + std::to_string(j + 1) + " has non-finite entries");
        check_form_factor(ch.f, grid);
    }
}

CMatrix gsb_counterterm(const GsbParams& p, const ModeGrid& grid) {
    CMatrix c = CMatrix::Zero(p.e_e.rows(), p.e_e.cols());
    for (const auto& cj : p.channels)
        for (const auto& cl : p.channels)
            c += scale_inner(cj.f, cl.f, -1.0, grid) * (cj.sigma_plus * cl.sigma_plus.adjoint());
    c *= p.lambda * p.lambda;
    // exact Hermitian symmetrization; the sum is Hermitian up to rounding
    return 0.5 * (c + c.adjoint());
}

namespace {

CMatrix effective_energy(const GsbParams& p, const ModeGrid& grid) {
    validate(p, grid);
    if (!p.experimental_counterterm) return p.e_e;
    return p.e_e + gsb_counterterm(p, grid);
}

TwoSectorSystem make_gsb_system(const GsbParams& p, const CMatrix& e_e, const ModeGrid& grid,
                                const FockBasis& basis) {
    auto energies = free_energies(grid, basis);
    SparseMatrix he = excited_hamiltonian(e_e, energies);
    const auto d = basis.dimension();
    SparseMatrix a(static_cast<Eigen::Index>(p.dim_e() * d), static_cast<Eigen::Index>(p.dim_g() * d));
    for (const auto& ch : p.channels) a += kron(ch.sigma_plus, annihilator(ch.f, grid, basis).matrix);
    drop_zeros(a);
    return TwoSectorSystem(std::move(he), GroundBlock(p.e_g, std::move(energies)), std::move(a), p.lambda);
}

} // namespace

GsbModel::GsbModel(GsbParams params, const ModeGrid& grid, const FockBasis& basis)
    : params_(std::move(params)),
      e_e_eff_(effective_energy(params_, grid)),
      fock_dim_(basis.dimension()),
      system_(make_gsb_system(params_, e_e_eff_, grid, basis)) {}

BlockHamiltonian GsbModel::assemble() const {
    BlockHamiltonian h;
    h.matrix = system_.assemble();
    std::size_t off = 0;
    h.block_offsets.push_back(0);
    for (std::size_t a = 0; a < params_.dim_e(); ++a) {
        off += fock_dim_;
        h.block_offsets.push_back(off);
        h.block_labels.push_back("e" + std::to_string(a + 1));
    }
    for (std::size_t b = 0; b < params_.dim_g(); ++b) {
        off += fock_dim_;
        h.block_offsets.push_back(off);
        h.block_labels.push_back("g" + std::to_string(b + 1));
    }
    return h;
}

BlockHamiltonian assemble_gsb(const GsbParams& p, const ModeGrid& grid, const FockBasis& basis) {
    return GsbModel(p, grid, basis).assemble();
}

SparseMatrix gsb_sigma(Complex z, const GsbParams& p, const ModeGrid& grid, const FockBasis& basis) {
    return GsbModel(p, grid, basis).sigma(z);
}

GsbActionCheck gsb_singular_action(const TwoBlockState& phi, const GsbParams& p, const ModeGrid& grid,
                                   const FockBasis& basis) {
    GsbModel m(p, grid, basis);
    GsbActionCheck out;
    out.action = m.singular_action(phi);
    TwoBlockState shifted{phi.excited, phi.ground + m.domain_shift(phi.excited)};
    const TwoBlockState direct = m.system().matrix_action(shifted);
    const CVector diff = out.action.stacked() - direct.stacked();
    const double scale = std::max(direct.stacked().norm(), 1e-300);
    out.max_relative_defect = diff.norm() / scale;
    return out;
}

} // namespace sbren
