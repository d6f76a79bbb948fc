// validators.hpp: symmetry and physicality checks on maps, generators and populations

#pragma once

#include <string>
#include <vector>

#include "symstruct/generator_core.hpp"

namespace symstruct {

enum class Verdict { Pass, Fail, Inconclusive };

std::string to_string(Verdict v);
// Fail dominates Inconclusive, which dominates Pass.
Verdict combine(Verdict a, Verdict b);

// Running trapezoid integrals of Re a_alpha(t); an alpha passes iff every running integral is <= tol.
// Integration of an alpha stops at its first SINGULAR point, which makes it Inconclusive unless it already failed.
struct AsymmetryReport {
    std::vector<Verdict> verdicts;
    std::vector<std::vector<double>> integrals;
    std::vector<double> worst_margin;  // max running integral per alpha
    Verdict verdict{Verdict::Pass};
};

AsymmetryReport asymmetry_integral_check(const std::vector<std::vector<double>>& a_alpha, const TimeGrid& grid,
                                         const std::vector<bool>& singular = {}, double tol = 1e-8);

// |lambda_alpha(t)| <= 1 + tol for the eigenvalue of each map on every transition operator.
// Maps whose block residual exceeds block_tol make the verdict Inconclusive.
struct TraceNormReport {
    std::vector<std::vector<double>> abs_eigenvalues;  // [time][alpha]
    double max_abs_eigenvalue{0.0};
    double max_block_residual{0.0};
    Verdict verdict{Verdict::Pass};
};

TraceNormReport trace_norm_monotone_check(const std::vector<Superoperator>& maps, const EigenoperatorBasis& basis,
                                          double tol = 1e-10, double block_tol = 1e-9);

// Damping matrix M of map eigen-data: M(n, n) = tr(Pi_n Lambda[Pi_n]), M(n, m) = lambda of F_nm.
struct DampingReport {
    Matrix matrix;
    double min_eigenvalue{0.0};
    double hermiticity_residual{0.0};
    Verdict verdict{Verdict::Pass};
};

DampingReport damping_matrix_check(const Superoperator& map, const EigenoperatorBasis& basis, double tol = 1e-8);
// Generator analogue: diagonal b_nn, off-diagonal a_nm. Reported only, never gated.
Matrix generator_damping_matrix(const Superoperator& generator, const EigenoperatorBasis& basis);

struct CptpReport {
    double min_choi_eigenvalue{0.0};
    double trace_residual{0.0};        // max |tr_out J - I|
    double hermiticity_residual{0.0};  // max |J - J^dagger|
    Verdict verdict{Verdict::Pass};
};

CptpReport cptp_check(const Superoperator& map, double tol = 1e-10);

// Piecewise-linear Lorenz curve from (0, 0) to (sum exp(-beta E), 1).
struct LorenzCurve {
    std::vector<double> x;
    std::vector<double> y;

    double operator()(double at) const;
};

LorenzCurve lorenz_curve(const std::vector<double>& p, const std::vector<double>& energies, double beta);

struct ThermomajorizationReport {
    LorenzCurve initial;
    LorenzCurve final_curve;
    double worst_margin{0.0};  // min over final breakpoints of initial - final
    Verdict verdict{Verdict::Pass};
};

ThermomajorizationReport thermomajorization_check(const std::vector<double>& p_init,
                                                  const std::vector<double>& p_final,
                                                  const std::vector<double>& energies, double beta,
                                                  double tol = 1e-10);

// |tr(M (rho_deg(t) - rho_eps(t)))| <= eps t + slack eps^2 with eps = ||H_deg - H_eps||_2, both joint
// Hamiltonians evolved exactly from rho_S kron rho_E.
struct DegeneracyReport {
    double epsilon{0.0};
    std::vector<std::vector<double>> differences;  // [time][povm]
    double worst_excess{0.0};                      // max of difference - bound
    double max_slope{0.0};                         // max difference / t over t > 0
    Verdict verdict{Verdict::Pass};
};

DegeneracyReport degeneracy_bound_check(const Matrix& h_deg, const Matrix& h_eps, const DensityOperator& rho_s,
                                        const DensityOperator& rho_env, const std::vector<Matrix>& povm,
                                        const TimeGrid& grid, double slack = 10.0);

} // namespace symstruct
