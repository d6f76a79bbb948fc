// reference_models.hpp: closed-form Jaynes-Cummings and spin-star oracles and their joint Hamiltonians

#pragma once

#include <utility>
#include <vector>

#include "symstruct/coefficient_extraction.hpp"

namespace symstruct {

enum class Picture { Interaction, Schroedinger };

// Qubit map (x, y, z) -> (eta_perp x, eta_perp y, eta_par z + r) with the coherence <e|.|g> multiplied by
// `phase`. Basis order |e>, |g>.
Superoperator phase_covariant_qubit_map(double eta_par, double eta_perp, double r, cplx phase = 1.0);

// Resonant Jaynes-Cummings model with a Fock-diagonal environment.
struct JCConfig {
    double g{1.0};
    double omega{1.0};
    std::vector<double> env_populations{1.0};  // p_n, n = 0..n_trunc
    int n_trunc{1};

    void validate() const;
};

// Bloch functions and their analytic time derivatives.
struct JCRates {
    TimeGrid grid;
    std::vector<double> eta_par, eta_perp, r;
    std::vector<double> deta_par, deta_perp, dr;
    std::vector<double> gamma_plus, gamma_minus, gamma_z;
    std::vector<bool> singular;
};

// eta_par, eta_perp, r and their derivatives only.
JCRates jc_bloch_functions(const JCConfig& cfg, const TimeGrid& grid);

// Adds gamma_+- = (eta_par/2) d/dt[(1 +- r)/eta_par] and gamma_z = (deta_par/eta_par - 2 deta_perp/eta_perp)/4.
// A point is SINGULAR where |eta_par| or |eta_perp| < 1e-10, or where either crosses or touches zero before the next point.
JCRates jc_rates(const JCConfig& cfg, const TimeGrid& grid);

Superoperator jc_exact_map(const JCConfig& cfg, double t, Picture picture = Picture::Interaction);

// H_S = (omega/2) sigma_z, H_E = omega n, H_SE = g (sigma_+ b + sigma_- b^dagger) on C^2 kron C^(n_trunc+1).
// Throws InvalidArgument when the top Fock level is populated (the excitation can leak past the truncation).
JointSystem jc_joint_hamiltonian(const JCConfig& cfg);

// Spin-star model: central spin coupled to K environment spins in the fully mixed state.
struct SpinStarConfig {
    int K{1};
    double g{1.0};
    double omega{1.0};

    void validate(int max_k) const;
};

// One (j, m) sector: weight d(j, m) / 2^K and ladder eigenvalues h(j, m), h(j, -m).
struct SpinStarTerm {
    double j{0.0};
    double m{0.0};
    double weight{0.0};
    double h_plus{0.0};   // sqrt(eig J_+ J_-)
    double h_minus{0.0};  // sqrt(eig J_- J_+)
};

// d(j, m) = C(K, K/2 - j) - C(K, K/2 - j - 1), exact in integer arithmetic.
double spinstar_degeneracy(int K, double j);
double spinstar_h(double j, double m);
std::vector<SpinStarTerm> spinstar_terms(int K);

struct SpinStarKappas {
    TimeGrid grid;
    std::vector<double> kappa_z, kappa, dkappa_z, dkappa;
};

SpinStarKappas spinstar_kappas(const SpinStarConfig& cfg, const TimeGrid& grid);

// rho_S = I/2 + (r_z/2) sigma_z + r_+ sigma_+ + r_- sigma_- with r_z(t) = kappa_z r_z(0) and
// r_+-(t) = exp(-+ 2 i omega t) kappa r_+-(0) in the Schroedinger picture.
Trajectory spinstar_exact_trajectory(const SpinStarConfig& cfg, const Matrix& rho0, const TimeGrid& grid,
                                     Picture picture = Picture::Schroedinger);
Superoperator spinstar_exact_map(const SpinStarConfig& cfg, double t, Picture picture = Picture::Schroedinger);

// L = (eta_z D_z - eta (D_+ + D_-)) / 2 with eta = dkappa_z/kappa_z and eta_z = eta/2 - dkappa/kappa.
// SINGULAR where |kappa| or |kappa_z| < 1e-10, or where either crosses or touches zero before the next point.
struct SpinStarGenerator {
    TimeGrid grid;
    std::vector<double> eta_z, eta;
    std::vector<bool> singular;
};

SpinStarGenerator spinstar_exact_generator(const SpinStarConfig& cfg, const TimeGrid& grid);

// Interaction-picture dissipative part; add -i[omega sigma_z, .] for the Schroedinger picture.
Superoperator spinstar_generator_superop(double eta_z, double eta);

// Q_n = 2^-K <(J_+ J_-)^n> and R_m^(n-m) = 2^-K <(J_+ J_-)^(n-m) (J_- J_+)^m>.
std::pair<double, double> spinstar_moments(const SpinStarConfig& cfg, int n, int m);

// H_S = omega sigma_z, H_E = omega sum_k sigma_z^(k), H_SE = 2 g (sigma_+ J_- + sigma_- J_+), rho_E = I / 2^K.
JointSystem spinstar_joint_hamiltonian(const SpinStarConfig& cfg);

// Spin-1 central system with equally spaced levels H_S = 2 omega diag(1, 0, -1) (degenerate Bohr spectrum),
// H_SE = 2 g (S_+ J_- + S_- J_+) with S_+ = sum_k |k><k+1|; same environment as the spin-star.
JointSystem spinstar_spin1_joint_hamiltonian(const SpinStarConfig& cfg);

} // namespace symstruct
