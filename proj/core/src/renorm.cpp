#include "sbren/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "sbren/parallel.hpp"

namespace sbren {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double norm_sq(const FormFactor& f, double s, const ModeGrid& grid) {
    const double n = scale_norm(f, s, grid);
    return n * n;
}

CVector random_unit(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CVector v(static_cast<Eigen::Index>(n));
    for (auto& x : v) x = Complex{g(rng), g(rng)};
    v.normalize();
    return v;
}

} // namespace

CutoffFamily build_family(const FormFactorRule& rule, const ModeGrid& grid, std::vector<double> cutoffs) {
    if (cutoffs.empty()) throw std::invalid_argument("build_family: no cutoffs given");
    for (std::size_t i = 0; i < cutoffs.size(); ++i) {
        if (!(cutoffs[i] > 0.0) || !std::isfinite(cutoffs[i]))
            throw std::invalid_argument("build_family: cutoffs must be positive and finite");
        if (i > 0 && !(cutoffs[i] > cutoffs[i - 1]))
            throw std::invalid_argument("build_family: cutoffs must be strictly increasing");
    }
    if (cutoffs.back() > grid.omega_support() * (1.0 + 1e-12))
        throw std::invalid_argument("build_family: cutoff " + std::to_string(cutoffs.back()) +
                                    " lies above the grid support " + std::to_string(grid.omega_support()));
    CutoffFamily fam;
    fam.base = rule;
    fam.cutoffs = std::move(cutoffs);
    const FormFactor base = make_form_factor(rule, grid);
    const auto om = grid.dispersion();
    for (double cut : fam.cutoffs) {
        FormFactor f = base;
        f.label = rule.label() + "|omega<=" + std::to_string(cut);
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (om[i] > cut) f.values[i] = Complex{};
        fam.norm_sq_0.push_back(norm_sq(f, 0.0, grid));
        fam.norm_sq_m1.push_back(norm_sq(f, -1.0, grid));
        fam.norm_sq_m2.push_back(norm_sq(f, -2.0, grid));
        fam.realized.push_back(std::move(f));
    }
    return fam;
}

double cutoff_difference_norm(const CutoffFamily& family, std::size_t a, std::size_t b, double s,
                              const ModeGrid& grid) {
    if (a >= family.size() || b >= family.size()) throw std::out_of_range("cutoff_difference_norm: index");
    FormFactor d = family.realized[a];
    for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] -= family.realized[b].values[i];
    return scale_norm(d, s, grid);
}

double RenormSchedule::identity_defect() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < bare.size(); ++i)
        worst = std::max(worst, std::abs(bare[i] - lambda * lambda * counterterm[i] - dressed));
    return worst / std::max(1.0, std::abs(dressed));
}

RenormSchedule counterterm(double dressed, double lambda, const CutoffFamily& family, const ModeGrid& grid,
                           CountertermAnchor anchor, double omega_g) {
    RenormSchedule s;
    s.dressed = dressed;
    s.lambda = lambda;
    s.anchor = anchor;
    for (std::size_t i = 0; i < family.size(); ++i) {
        const double c = anchor == CountertermAnchor::norm_minus_one
                             ? family.norm_sq_m1[i]
                             : counterterm_integral(family.realized[i], grid, anchor, omega_g);
        s.counterterm.push_back(c);
        s.bare.push_back(dressed + lambda * lambda * c);
    }
    return s;
}

double resolvent_distance(const SparseMatrix& h1, const SparseMatrix& h2, Complex z, DistanceMode mode,
                          const std::vector<CVector>& probes, DistanceOptions options) {
    if (h1.rows() != h2.rows() || h1.rows() != h1.cols() || h2.rows() != h2.cols())
        throw std::invalid_argument("resolvent_distance: Hamiltonians must be square and of equal size");
    const auto n = static_cast<std::size_t>(h1.rows());
    ShiftedSolver r1(h1, z), r2(h2, z);
    auto apply = [&](const CVector& x) -> CVector { return r1.solve(x).x - r2.solve(x).x; };
    if (mode == DistanceMode::strong) {
        if (probes.empty()) throw std::invalid_argument("resolvent_distance: strong mode needs probe vectors");
        double worst = 0.0;
        for (const auto& p : probes) {
            if (static_cast<std::size_t>(p.size()) != n)
                throw std::invalid_argument("resolvent_distance: probe has the wrong length");
            const double pn = p.norm();
            if (pn == 0.0) continue;
            worst = std::max(worst, apply(p).norm() / pn);
        }
        return worst;
    }
    // (R1(z) - R2(z))^dag = R1(conj z) - R2(conj z) for Hermitian H
    ShiftedSolver r1c(h1, std::conj(z)), r2c(h2, std::conj(z));
    auto apply_adj = [&](const CVector& x) -> CVector { return r1c.solve(x).x - r2c.solve(x).x; };
    std::mt19937_64 rng(options.seed);
    CVector x = random_unit(n, rng);
    double est = 0.0;
    for (std::size_t it = 0; it < options.iterations; ++it) {
        const CVector y = apply(x);
        est = y.norm();
        if (est == 0.0) break;
        CVector w = apply_adj(y);
        const double wn = w.norm();
        if (wn == 0.0) break;
        x = w / wn;
    }
    return est;
}

Complex dressed_vacuum_element(Complex z, double dressed, double lambda, const FormFactor& f, const ModeGrid& grid,
                               const FockBasis& basis, CountertermAnchor anchor) {
    SpinBosonParams p;
    p.omega_e = dressed;
    p.lambda = lambda;
    p.f = f;
    p.renormalized = true;
    p.anchor = anchor;
    const SpinBoson sb(std::move(p), grid, basis);
    return sb.propagator_inverse_apply(z, vacuum(basis)).x[0];
}

Complex flat_linear_tail(Complex z, double lambda, double l1, double l2, CountertermAnchor anchor) {
    const double shift = anchor == CountertermAnchor::norm_minus_one ? 0.0 : 1.0;
    auto prim = [&](double k) { return std::log((k - z) / (k + shift)); };
    return lambda * lambda * (prim(l2) - prim(l1));
}

std::vector<SweepRow> renorm_sweep(const CutoffFamily& family, const ModeGrid& grid, const FockBasis& basis,
                                   const SweepOptions& options) {
    const std::size_t n = family.size();
    std::vector<SweepRow> rows(n);
    std::vector<SparseMatrix> hams(options.distances ? n : 0);
    parallel_for(n, options.threads, [&](std::size_t i) {
        SpinBosonParams p;
        p.omega_e = options.omega_e;
        p.lambda = options.lambda;
        p.f = family.realized[i];
        p.renormalized = options.renormalized;
        p.anchor = options.anchor;
        const SpinBoson sb(std::move(p), grid, basis);
        const auto st = sb.psi0_energy_stats();
        SweepRow& r = rows[i];
        r.cutoff = family.cutoffs[i];
        r.norm_0 = std::sqrt(family.norm_sq_0[i]);
        r.norm_m1 = std::sqrt(family.norm_sq_m1[i]);
        r.norm_m2 = std::sqrt(family.norm_sq_m2[i]);
        r.omega_bare = sb.bare_omega_e();
        r.mean_e = st.mean;
        r.var_e = st.variance;
        r.res_dist_norm = kNaN;
        r.res_dist_strong = kNaN;
        r.diff_norm_m1 = i == 0 ? kNaN : cutoff_difference_norm(family, i, i - 1, -1.0, grid);
        r.diff_norm_m2 = i == 0 ? kNaN : cutoff_difference_norm(family, i, i - 1, -2.0, grid);
        if (options.distances) hams[i] = sb.assemble().matrix;
    });
    if (!options.distances || n < 2) return rows;

    const auto dim = static_cast<std::size_t>(hams.front().rows());
    std::vector<CVector> probes;
    CVector psi0 = CVector::Zero(static_cast<Eigen::Index>(dim));
    psi0[0] = 1.0;
    probes.push_back(psi0);
    std::mt19937_64 rng(options.seed);
    for (std::size_t k = 0; k < options.random_probes; ++k) probes.push_back(random_unit(dim, rng));
    parallel_for(n - 1, options.threads, [&](std::size_t k) {
        const std::size_t i = k + 1;
        rows[i].res_dist_norm =
            resolvent_distance(hams[i - 1], hams[i], options.z, DistanceMode::norm, probes, options.distance);
        rows[i].res_dist_strong =
            resolvent_distance(hams[i - 1], hams[i], options.z, DistanceMode::strong, probes, options.distance);
    });
    return rows;
}

CauchyReport propagator_cauchy(const CutoffFamily& family, const ModeGrid& grid, double dressed, double lambda,
                               Complex z, CountertermAnchor anchor) {
    if (family.size() < 2) throw std::invalid_argument("propagator_cauchy: need at least two cutoffs");
    const FockBasis basis(grid.size(), 1);
    CauchyReport rep;
    rep.cutoffs = family.cutoffs;
    double frozen = 0.0;
    for (std::size_t i = 0; i < family.size(); ++i) {
        SpinBosonParams p;
        p.omega_e = dressed;
        p.lambda = lambda;
        p.f = family.realized[i];
        p.renormalized = true;
        p.anchor = anchor;
        const SpinBoson sb(p, grid, basis);
        if (i == 0) frozen = sb.bare_omega_e();
        rep.dressed.push_back(sb.propagator_inverse_apply(z, vacuum(basis)).x[0]);
        p.omega_e = frozen;
        p.renormalized = false;
        const SpinBoson fixed(std::move(p), grid, basis);
        rep.fixed_bare.push_back(fixed.propagator_inverse_apply(z, vacuum(basis)).x[0]);
    }
    rep.increments.push_back(kNaN);
    rep.tail_bounds.push_back(kNaN);
    rep.fixed_increments.push_back(kNaN);
    for (std::size_t i = 1; i < family.size(); ++i) {
        rep.increments.push_back(std::abs(rep.dressed[i] - rep.dressed[i - 1]));
        rep.fixed_increments.push_back(std::abs(rep.fixed_bare[i] - rep.fixed_bare[i - 1]));
        // 1/D' - 1/D = -(D' - D) g g'
        const double tail = std::abs(flat_linear_tail(z, lambda, family.cutoffs[i - 1], family.cutoffs[i], anchor)) *
                            std::abs(rep.dressed[i]) * std::abs(rep.dressed[i - 1]);
        rep.tail_bounds.push_back(tail);
        rep.max_increment_ratio = std::max(rep.max_increment_ratio, rep.increments.back() / tail);
    }
    rep.dressed_drift = std::abs(rep.dressed.back() - rep.dressed.front());
    rep.fixed_drift = std::abs(rep.fixed_bare.back() - rep.fixed_bare.front());
    return rep;
}

std::string to_string(CouplingClass c) {
    switch (c) {
    case CouplingClass::regular: return "H";
    case CouplingClass::h_minus_one: return "H_-1\\H";
    case CouplingClass::singular: return "H^r_-s\\H_-1";
    }
    return "unknown";
}

DivergenceVerdict divergence_verdict(const std::vector<double>& cutoffs, const std::vector<double>& values,
                                     double threshold) {
    if (cutoffs.size() != values.size()) throw std::invalid_argument("divergence_verdict: length mismatch");
    if (cutoffs.empty()) throw std::invalid_argument("divergence_verdict: empty sweep");
    const double floor = cutoffs.back() / 10.0 * (1.0 - 1e-12);
    std::vector<double> x, y;
    for (std::size_t i = 0; i < cutoffs.size(); ++i)
        if (cutoffs[i] >= floor) {
            x.push_back(cutoffs[i]);
            y.push_back(values[i]);
        }
    if (x.size() < 2) throw std::invalid_argument("divergence_verdict: the top decade holds fewer than two cutoffs");
    DivergenceVerdict v;
    if (std::all_of(y.begin(), y.end(), [](double t) { return t == 0.0; })) return v;
    v.slope = loglog_slope(x, y);
    v.diverging = v.slope > threshold;
    return v;
}

CouplingClassification classify_family(const CutoffFamily& family, const ModeGrid& grid, double decay_s,
                                       int decay_n_max) {
    CouplingClassification c;
    const auto in_h = !divergence_verdict(family.cutoffs, family.norm_sq_0).diverging;
    const auto in_hm1 = !divergence_verdict(family.cutoffs, family.norm_sq_m1).diverging;
    c.coupling_class = in_h ? CouplingClass::regular
                            : (in_hm1 ? CouplingClass::h_minus_one : CouplingClass::singular);
    c.coupling_note = "Arbitrary";
    switch (c.coupling_class) {
    case CouplingClass::regular: c.approximation = ""; break;
    case CouplingClass::h_minus_one: c.approximation = "norm resolvent"; break;
    case CouplingClass::singular: {
        c.approximation = "strong resolvent";
        c.decay = decay_exponent(family.realized.back(), decay_s, grid, decay_n_max);
        if (c.decay->r_min >= 0.95) c.coupling_note = "Small";
        break;
    }
    }
    return c;
}

Table1Report table1_report(const CutoffFamily& family, const ModeGrid& grid, const Table1Options& options) {
    Table1Report rep;
    rep.label = family.base.label();
    auto c = classify_family(family, grid, options.decay_s, options.decay_n_max);
    rep.coupling_class = c.coupling_class;
    rep.approximation = std::move(c.approximation);
    rep.coupling_note = std::move(c.coupling_note);
    rep.decay = std::move(c.decay);
    const FockBasis basis(grid.size(), 1);
    SweepOptions so;
    so.omega_e = options.omega_e;
    so.lambda = options.lambda;
    so.renormalized = rep.coupling_class == CouplingClass::singular;
    so.anchor = options.anchor;
    so.distances = false;
    so.threads = options.threads;
    rep.rows = renorm_sweep(family, grid, basis, so);
    std::vector<double> mean, var;
    rep.mean_equals_omega_e = true;
    for (const auto& r : rep.rows) {
        mean.push_back(r.mean_e);
        var.push_back(r.var_e);
        rep.mean_equals_omega_e = rep.mean_equals_omega_e && r.mean_e == options.omega_e;
    }
    rep.mean = divergence_verdict(family.cutoffs, mean);
    rep.variance = divergence_verdict(family.cutoffs, var);
    return rep;
}

} // namespace sbren
