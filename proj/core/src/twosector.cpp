#include "sbren/twosector.hpp"

#include <cmath>
#include <stdexcept>

#include "sbren/fieldops.hpp"

namespace sbren {

CVector TwoBlockState::stacked() const {
    CVector v(excited.size() + ground.size());
    v << excited, ground;
    return v;
}

TwoBlockState TwoBlockState::split(const CVector& v, std::size_t excited_dim) {
    const auto e = static_cast<Eigen::Index>(excited_dim);
    if (e > v.size()) throw std::invalid_argument("TwoBlockState::split: vector shorter than the excited block");
    return {v.head(e), v.tail(v.size() - e)};
}

GroundBlock::GroundBlock(const CMatrix& e_g, std::vector<double> fock_energies)
    : e_g_(e_g), fock_(std::move(fock_energies)) {
    if (e_g_.rows() == 0 || e_g_.rows() != e_g_.cols())
        throw std::invalid_argument("GroundBlock: E_g must be square and nonempty");
    if ((e_g_ - e_g_.adjoint()).cwiseAbs().maxCoeff() != 0.0)
        throw std::invalid_argument("GroundBlock: E_g must be Hermitian");
    for (Eigen::Index r = 0; r < e_g_.rows() && diagonal_; ++r)
        for (Eigen::Index c = 0; c < e_g_.cols(); ++c)
            if (r != c && e_g_(r, c) != Complex{}) {
                diagonal_ = false;
                break;
            }
    if (diagonal_) {
        eigenvalues_ = e_g_.diagonal().real();
    } else {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(e_g_);
        eigenvalues_ = es.eigenvalues();
        eigenvectors_ = es.eigenvectors();
    }
}

SparseMatrix GroundBlock::hamiltonian() const {
    const auto d = static_cast<Eigen::Index>(fock_.size());
    std::vector<Triplet> t;
    for (Eigen::Index a = 0; a < e_g_.rows(); ++a)
        for (Eigen::Index b = 0; b < e_g_.cols(); ++b) {
            if (a == b) {
                for (Eigen::Index k = 0; k < d; ++k) t.emplace_back(a * d + k, a * d + k, e_g_(a, a).real() + fock_[k]);
            } else if (e_g_(a, b) != Complex{}) {
                for (Eigen::Index k = 0; k < d; ++k) t.emplace_back(a * d + k, b * d + k, e_g_(a, b));
            }
        }
    SparseMatrix m = sparse_from_triplets(dimension(), dimension(), t);
    drop_zeros(m);
    return m;
}

SparseMatrix GroundBlock::resolvent(Complex z) const {
    const auto d = static_cast<Eigen::Index>(fock_.size());
    const auto g = static_cast<Eigen::Index>(levels());
    std::vector<Triplet> t;
    for (Eigen::Index b = 0; b < g; ++b)
        for (Eigen::Index k = 0; k < d; ++k) {
            const Complex den = eigenvalues_[b] + fock_[k] - z;
            if (std::abs(den) < 1e-300 || !std::isfinite(std::abs(den)))
                throw NumericalError("ground resolvent: z lies on the spectrum of h_g",
                                     SolveReport{"diagonal", dimension(), 0, std::nan(""), false});
            const Complex inv = 1.0 / den;
            if (diagonal_) {
                t.emplace_back(b * d + k, b * d + k, inv);
            } else {
                for (Eigen::Index a = 0; a < g; ++a)
                    for (Eigen::Index c = 0; c < g; ++c) {
                        const Complex v = eigenvectors_(a, b) * inv * std::conj(eigenvectors_(c, b));
                        if (v != Complex{}) t.emplace_back(a * d + k, c * d + k, v);
                    }
            }
        }
    return sparse_from_triplets(dimension(), dimension(), t);
}

TwoSectorSystem::TwoSectorSystem(SparseMatrix h_e, GroundBlock ground, SparseMatrix a, double lambda)
    : h_e_(std::move(h_e)), ground_(std::move(ground)), a_(std::move(a)), lambda_(lambda) {
    if (h_e_.rows() != h_e_.cols()) throw std::invalid_argument("TwoSectorSystem: h_e must be square");
    if (static_cast<std::size_t>(a_.rows()) != excited_dim() || static_cast<std::size_t>(a_.cols()) != ground_dim())
        throw std::invalid_argument("TwoSectorSystem: coupling shape does not match the blocks");
    if (!std::isfinite(lambda_)) throw std::invalid_argument("TwoSectorSystem: lambda must be finite");
}

SparseMatrix TwoSectorSystem::assemble() const {
    const auto ne = static_cast<Eigen::Index>(excited_dim());
    const auto n = excited_dim() + ground_dim();
    std::vector<Triplet> t;
    auto place = [&](const SparseMatrix& m, Eigen::Index r0, Eigen::Index c0) {
        for (Eigen::Index k = 0; k < m.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(m, k); it; ++it) t.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
    };
    place(h_e_, 0, 0);
    place(ground_.hamiltonian(), ne, ne);
    if (lambda_ != 0.0) {
        for (Eigen::Index k = 0; k < a_.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(a_, k); it; ++it) {
                const Complex v = lambda_ * it.value();
                t.emplace_back(it.row(), ne + it.col(), v);
                t.emplace_back(ne + it.col(), it.row(), std::conj(v));
            }
    }
    SparseMatrix m = sparse_from_triplets(n, n, t);
    drop_zeros(m);
    return m;
}

SparseMatrix TwoSectorSystem::self_energy(Complex z) const {
    SparseMatrix ah = a_.adjoint();
    SparseMatrix s = a_ * (ground_.resolvent(z) * ah);
    s.makeCompressed();
    return s;
}

SparseMatrix TwoSectorSystem::propagator(Complex z) const {
    SparseMatrix g = h_e_ - z * sparse_identity(excited_dim());
    if (lambda_ != 0.0) g -= (lambda_ * lambda_) * self_energy(z);
    g.makeCompressed();
    return g;
}

SolveResult TwoSectorSystem::propagator_solve(Complex z, const CVector& psi_e) const {
    if (static_cast<std::size_t>(psi_e.size()) != excited_dim())
        throw std::invalid_argument("propagator_solve: vector does not match the excited block");
    try {
        return solve(propagator(z), Complex{}, psi_e);
    } catch (const NumericalError& e) {
        SolveReport rep = e.report();
        rep.method = "propagator/" + rep.method;
        throw NumericalError(std::string("propagator G(z) not invertible: ") + e.what(), rep);
    }
}

TwoBlockState TwoSectorSystem::resolvent_apply(Complex z, const TwoBlockState& psi, SolveReport* report) const {
    if (static_cast<std::size_t>(psi.excited.size()) != excited_dim() ||
        static_cast<std::size_t>(psi.ground.size()) != ground_dim())
        throw std::invalid_argument("resolvent_apply: state does not match the blocks");
    const SparseMatrix rg = ground_.resolvent(z);
    const CVector rg_psi = rg * psi.ground;
    CVector rhs = psi.excited;
    if (lambda_ != 0.0) rhs -= lambda_ * (a_ * rg_psi);
    SolveResult ge = propagator_solve(z, rhs);
    TwoBlockState out;
    out.excited = std::move(ge.x);
    out.ground = rg_psi;
    if (lambda_ != 0.0) out.ground -= lambda_ * (rg * (a_.adjoint() * out.excited));
    if (report) *report = ge.report;
    return out;
}

CVector TwoSectorSystem::domain_shift(const CVector& phi_e) const {
    if (lambda_ == 0.0) return CVector::Zero(static_cast<Eigen::Index>(ground_dim()));
    return -lambda_ * (ground_.resolvent(Complex{-1.0, 0.0}) * (a_.adjoint() * phi_e));
}

TwoBlockState TwoSectorSystem::singular_action(const TwoBlockState& phi) const {
    const Complex anchor{-1.0, 0.0};
    TwoBlockState out;
    out.excited = h_e_ * phi.excited;
    out.ground = ground_.hamiltonian() * phi.ground;
    if (lambda_ != 0.0) {
        out.excited += -(lambda_ * lambda_) * (self_energy(anchor) * phi.excited) + lambda_ * (a_ * phi.ground);
        out.ground += lambda_ * (ground_.resolvent(anchor) * (a_.adjoint() * phi.excited));
    }
    return out;
}

TwoBlockState TwoSectorSystem::matrix_action(const TwoBlockState& psi) const {
    return TwoBlockState::split(assemble() * psi.stacked(), excited_dim());
}

} // namespace sbren
