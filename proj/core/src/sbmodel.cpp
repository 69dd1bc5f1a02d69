#include "sbren/sbmodel.hpp"

#include <cmath>
#include <stdexcept>

namespace sbren {

std::string to_string(CountertermAnchor anchor) {
    switch (anchor) {
    case CountertermAnchor::norm_minus_one: return "norm_minus_one";
    case CountertermAnchor::resolvent_at_minus_one: return "resolvent_at_minus_one";
    }
    return "unknown";
}

CountertermAnchor parse_anchor(const std::string& name) {
    if (name == "norm_minus_one") return CountertermAnchor::norm_minus_one;
    if (name == "resolvent_at_minus_one") return CountertermAnchor::resolvent_at_minus_one;
    throw std::invalid_argument("unknown counterterm anchor '" + name + "'");
}

double counterterm_integral(const FormFactor& f, const ModeGrid& grid, CountertermAnchor anchor, double omega_g) {
    if (anchor == CountertermAnchor::norm_minus_one) {
        const double n = scale_norm(f, -1.0, grid);
        return n * n;
    }
    check_form_factor(f, grid);
    const auto w = grid.weights();
    const auto om = grid.dispersion();
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) acc += w[i] * std::norm(f.values[i]) / (omega_g + om[i] + 1.0);
    return acc;
}

namespace {

SparseMatrix excited_block(double omega_e, const std::vector<double>& energies) {
    std::vector<Triplet> t;
    t.reserve(energies.size());
    for (std::size_t k = 0; k < energies.size(); ++k)
        t.emplace_back(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k), omega_e + energies[k]);
    SparseMatrix m = sparse_from_triplets(energies.size(), energies.size(), t);
    drop_zeros(m);
    return m;
}

double bare_energy(const SpinBosonParams& p, const ModeGrid& grid) {
    if (!std::isfinite(p.omega_e) || !std::isfinite(p.omega_g) || !std::isfinite(p.lambda))
        throw std::invalid_argument("SpinBoson: parameters must be finite");
    if (!p.renormalized) return p.omega_e;
    return p.omega_e + p.lambda * p.lambda * counterterm_integral(p.f, grid, p.anchor, p.omega_g);
}

TwoSectorSystem make_system(const SpinBosonParams& p, double bare, const ModeGrid& grid, const FockBasis& basis) {
    auto energies = free_energies(grid, basis);
    SparseMatrix he = excited_block(bare, energies);
    CMatrix eg(1, 1);
    eg(0, 0) = p.omega_g;
    return TwoSectorSystem(std::move(he), GroundBlock(eg, std::move(energies)),
                           annihilator(p.f, grid, basis).matrix, p.lambda);
}

} // namespace

SpinBoson::SpinBoson(SpinBosonParams params, const ModeGrid& grid, const FockBasis& basis)
    : params_(std::move(params)),
      bare_omega_e_(bare_energy(params_, grid)),
      system_(make_system(params_, bare_omega_e_, grid, basis)) {}

BlockHamiltonian SpinBoson::assemble() const {
    const auto d = fock_dim();
    return {system_.assemble(), {0, d, 2 * d}, {"excited", "ground"}};
}

EnergyStats SpinBoson::psi0_energy_stats() const {
    const SparseMatrix h = system_.assemble();
    CVector psi0 = CVector::Zero(h.rows());
    psi0[0] = 1.0;
    const CVector hpsi = h * psi0;
    EnergyStats st;
    st.mean = psi0.dot(hpsi).real();
    st.variance = (hpsi - st.mean * psi0).squaredNorm();
    return st;
}

BlockHamiltonian assemble_regular(const SpinBosonParams& p, const ModeGrid& grid, const FockBasis& basis) {
    SpinBosonParams q = p;
    q.renormalized = false;
    return SpinBoson(std::move(q), grid, basis).assemble();
}

BlockHamiltonian assemble_singular(const SpinBosonParams& p, const ModeGrid& grid, const FockBasis& basis) {
    SpinBosonParams q = p;
    q.renormalized = true;
    return SpinBoson(std::move(q), grid, basis).assemble();
}

EnergyStats psi0_energy_stats(const SpinBosonParams& p, const ModeGrid& grid, const FockBasis& basis) {
    return SpinBoson(p, grid, basis).psi0_energy_stats();
}

Complex friedrichs_vacuum_element(Complex z, double omega_e, double omega_g, double lambda, const FormFactor& f,
                                  const ModeGrid& grid) {
    check_form_factor(f, grid);
    const auto w = grid.weights();
    const auto om = grid.dispersion();
    Complex sigma{};
    for (std::size_t i = 0; i < grid.size(); ++i) sigma += w[i] * std::norm(f.values[i]) / (omega_g + om[i] - z);
    return 1.0 / (omega_e - z - lambda * lambda * sigma);
}

} // namespace sbren
