// renorm.hpp - sharp cutoff families, counterterm schedules and the
// convergence diagnostics of the cutoff limit

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sbren/fock.hpp"
#include "sbren/modegrid.hpp"
#include "sbren/sbmodel.hpp"

namespace sbren {

/// f^Lambda = base * 1{omega <= Lambda} for each cutoff.
struct CutoffFamily {
    FormFactorRule base;
    std::vector<double> cutoffs;
    std::vector<FormFactor> realized;
    // squared scale norms ||f^Lambda||_s^2 for s = 0, -1, -2
    std::vector<double> norm_sq_0;
    std::vector<double> norm_sq_m1;
    std::vector<double> norm_sq_m2;

    std::size_t size() const noexcept { return cutoffs.size(); }
};

CutoffFamily build_family(const FormFactorRule& rule, const ModeGrid& grid, std::vector<double> cutoffs);

/// ||f^{Lambda_a} - f^{Lambda_b}||_s
double cutoff_difference_norm(const CutoffFamily& family, std::size_t a, std::size_t b, double s,
                              const ModeGrid& grid);

/// Bare energies omega_e^Lambda = dressed + lam^2 c^Lambda, with c^Lambda the
/// anchored counterterm integral stored per entry.
struct RenormSchedule {
    double dressed{0.0};
    double lambda{0.0};
    CountertermAnchor anchor{CountertermAnchor::norm_minus_one};
    std::vector<double> counterterm; // c^Lambda
    std::vector<double> bare;        // omega_e^Lambda

    /// max |bare - lam^2 c - dressed| / max(1, |dressed|)
    double identity_defect() const;
};

RenormSchedule counterterm(double dressed, double lambda, const CutoffFamily& family, const ModeGrid& grid,
                           CountertermAnchor anchor = CountertermAnchor::norm_minus_one, double omega_g = 0.0);

enum class DistanceMode { norm, strong };

struct DistanceOptions {
    std::size_t iterations{100};
    std::uint64_t seed{11};
};

/// norm:   power-iteration estimate of ||R_1(z) - R_2(z)||
/// strong: max over probes of ||(R_1(z) - R_2(z)) psi|| / ||psi||
/// Both Hamiltonians must be Hermitian and of equal dimension.
double resolvent_distance(const SparseMatrix& h1, const SparseMatrix& h2, Complex z, DistanceMode mode,
                          const std::vector<CVector>& probes, DistanceOptions options = {});

/// <Omega, G~(z)^{-1} Omega> with bare energy dressed + lam^2 c(f), evaluated
/// by a propagator solve on the given basis.
Complex dressed_vacuum_element(Complex z, double dressed, double lambda, const FormFactor& f, const ModeGrid& grid,
                               const FockBasis& basis, CountertermAnchor anchor);

/// For f = 1 and omega = k: lam^2 int_{L1}^{L2} [1/(k - z) - 1/a(k)] dk with
/// a(k) = k (norm_minus_one) or k + 1 (resolvent_at_minus_one).
Complex flat_linear_tail(Complex z, double lambda, double l1, double l2, CountertermAnchor anchor);

// ---------------------------------------------------------------------------
// Sweeps

struct SweepOptions {
    double omega_e{1.0};  // bare (renormalized = false) or dressed energy
    double lambda{1.0};
    bool renormalized{false};
    CountertermAnchor anchor{CountertermAnchor::norm_minus_one};
    Complex z{0.0, 1.0};
    bool distances{true};
    std::size_t random_probes{3};
    std::uint64_t seed{1};
    std::size_t threads{1};
    DistanceOptions distance;
};

/// One cutoff of a sweep. Distances compare Lambda with the previous cutoff
/// and are NaN in the first row.
struct SweepRow {
    double cutoff{0.0};
    double norm_0{0.0};
    double norm_m1{0.0};
    double norm_m2{0.0};
    double omega_bare{0.0};
    double mean_e{0.0};
    double var_e{0.0};
    double res_dist_norm{0.0};
    double res_dist_strong{0.0};
    double diff_norm_m1{0.0}; // ||f^Lambda - f^Lambda'||_{-1}
    double diff_norm_m2{0.0};
};

std::vector<SweepRow> renorm_sweep(const CutoffFamily& family, const ModeGrid& grid, const FockBasis& basis,
                                   const SweepOptions& options);

struct CauchyReport {
    std::vector<double> cutoffs;
    std::vector<Complex> dressed;     // counterterm applied per cutoff
    std::vector<Complex> fixed_bare;  // bare energy frozen at the first cutoff
    std::vector<double> increments;   // |dressed_i - dressed_{i-1}|
    std::vector<double> tail_bounds;  // analytic tail increments (flat, linear case)
    std::vector<double> fixed_increments;
    double dressed_drift{0.0};        // |dressed_last - dressed_first|
    double fixed_drift{0.0};
    double max_increment_ratio{0.0};  // max increments / tail_bounds
};

/// Dressed vacuum propagator along a flat (f = 1, omega = k) family.
CauchyReport propagator_cauchy(const CutoffFamily& family, const ModeGrid& grid, double dressed, double lambda,
                               Complex z, CountertermAnchor anchor);

// ---------------------------------------------------------------------------
// Coupling-class table

enum class CouplingClass { regular, h_minus_one, singular };
std::string to_string(CouplingClass c);

/// log-log slope over the top decade of cutoffs, and its verdict (> 0.1).
struct DivergenceVerdict {
    double slope{0.0};
    bool diverging{false};
};
DivergenceVerdict divergence_verdict(const std::vector<double>& cutoffs, const std::vector<double>& values,
                                     double threshold = 0.1);

struct CouplingClassification {
    CouplingClass coupling_class{CouplingClass::regular};
    std::string approximation; // "", "norm resolvent", "strong resolvent"
    std::string coupling_note; // "Arbitrary" or "Small"
    std::optional<DecayFit> decay; // singular class only
};

/// The class is read off the norm table: ||f^Lambda||_0^2 and ||f^Lambda||_{-1}^2
/// are tested for divergence. The singular class gets a decay fit of the
/// largest cutoff; r_min >= 0.95 counts as r = 1 ("Small").
CouplingClassification classify_family(const CutoffFamily& family, const ModeGrid& grid, double decay_s = 2.0,
                                       int decay_n_max = 64);

struct Table1Options {
    double omega_e{1.0}; // fixed bare energy, or dressed energy in the singular class
    double lambda{1.0};
    CountertermAnchor anchor{CountertermAnchor::norm_minus_one};
    double decay_s{2.0};
    int decay_n_max{64};
    std::size_t threads{1};
};

struct Table1Report {
    std::string label;
    CouplingClass coupling_class{CouplingClass::regular};
    std::string approximation; // "", "norm resolvent", "strong resolvent"
    std::string coupling_note; // "Arbitrary" or "Small"
    std::optional<DecayFit> decay;
    std::vector<SweepRow> rows;
    DivergenceVerdict mean;
    DivergenceVerdict variance;
    bool mean_equals_omega_e{false}; // exact equality in every row
};

/// Classifies the family, then sweeps Psi_0 statistics on n_max = 1.
/// Singular families get the counterterm.
Table1Report table1_report(const CutoffFamily& family, const ModeGrid& grid, const Table1Options& options);

} // namespace sbren
