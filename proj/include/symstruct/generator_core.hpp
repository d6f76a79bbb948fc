// generator_core.hpp: symmetric master-equation generators, propagation, exact maps

#pragma once

#include <map>
#include <string>
#include <vector>

#include "symstruct/operator_algebra.hpp"
#include "symstruct/symmetry_basis.hpp"

namespace symstruct {

// Kinetic coefficients at one instant.
//   c:    real rates, one per transition F_alpha (basis ordering);
//   d:    Hermitian (N-1) x (N-1) matrix on P_1..P_{N-1};
//   hbar: Hermitian traceless N x N Hamiltonian correction.
struct CoefficientSet {
    RealVector c;
    Matrix d;
    Matrix hbar;

    static CoefficientSet zero(Index n);
};

// Coefficients on a time grid. Entries with singular[k] set carry no data (zeros).
struct KineticCoefficients {
    TimeGrid grid;
    std::vector<CoefficientSet> values;
    std::vector<bool> singular;

    std::size_t size() const { return values.size(); }
    // Throws if any invariant (sizes, reality, Hermiticity, tracelessness) is violated.
    void validate(Index n, double tol = 1e-10) const;
};

// Hermitian N x N matrix of source-drain coefficients p_ij in the projector basis.
struct SourceDrainRaw {
    Matrix p;
};

struct GklsForm {
    Matrix d;             // (N-1) x (N-1)
    Matrix hbar;          // N x N, Hermitian and traceless
    Matrix trace_defect;  // diagonal; zero iff p has vanishing diagonal
};

Superoperator assemble_generator(const CoefficientSet& coeffs, const EigenoperatorBasis& basis);
Superoperator assemble_generator(const KineticCoefficients& coeffs, const EigenoperatorBasis& basis,
                                 std::size_t t_index);

// Rewrite X -> sum_ij p_ij Pi_i X Pi_j in GKLS form. The identity
//   sum p_ij Pi_i X Pi_j = -i[hbar, X] + sum d_ij (P_i X P_j - 1/2 {P_j P_i, X}) + {trace_defect, X}
// holds exactly; trace_defect vanishes for trace-annihilating p.
GklsForm raw_to_gkls(const SourceDrainRaw& raw, const EigenoperatorBasis& basis);

// Source-drain superoperator X -> sum_ij p_ij Pi_i X Pi_j.
Superoperator source_drain_superop(const SourceDrainRaw& raw, const EigenoperatorBasis& basis);

struct Trajectory {
    TimeGrid grid;
    std::vector<Matrix> states;
    std::map<std::string, std::vector<double>> observables;

    // Re tr(O rho(t)) for every state, stored under name.
    void add_observable(const std::string& name, const Matrix& o);
    // Largest violation of the density-operator conditions over all states.
    double max_state_violation() const;
};

struct PropagationOptions {
    double norm_step = 0.05;     // ||L|| h bound for the RK4 substeps
    double trace_drift = 1e-6;   // abort threshold
};

// RK4 integration of d rho/dt = L(t) rho with L linear-interpolated between grid points.
Trajectory propagate(const KineticCoefficients& coeffs, const EigenoperatorBasis& basis,
                     const DensityOperator& rho0, const PropagationOptions& options = {});
// Same integrator for the full map, Lambda(t_0) = identity.
std::vector<Superoperator> propagate_map(const KineticCoefficients& coeffs, const EigenoperatorBasis& basis,
                                         const PropagationOptions& options = {});

// SpectralTensor precomputes per-entry weights in the eigenbasis of H (memory N^4 dim^2);
// Propagator forms exp(-iHt) at each time. Auto picks SpectralTensor when it fits in 2^24 entries.
enum class JointMapMethod { Auto, SpectralTensor, Propagator };

// Lambda(t)[X] = tr_E(exp(-iHt) (X kron rho_E) exp(iHt)) at each grid time.
std::vector<Superoperator> map_from_joint_unitary(const Matrix& h_joint, const DensityOperator& rho_env,
                                                  Index n_sys, const TimeGrid& grid, int threads = 1,
                                                  JointMapMethod method = JointMapMethod::Auto);

struct GeneratorSeries {
    std::vector<Superoperator> generators;  // empty Superoperator (dim 0) where singular
    std::vector<double> condition;
    std::vector<bool> singular;
};

// L = (dLambda/dt) Lambda^{-1} with five-point finite differences (three or four points when
// the grid is shorter); entries with condition number above cond_limit are flagged and omitted.
GeneratorSeries extract_generator(const std::vector<Superoperator>& maps, const TimeGrid& grid,
                                  double cond_limit = 1e12);

// Marks both ends of every grid interval where a map eigen-channel passes through zero between samples:
// a transition eigenvalue turning by more than 90 degrees, or the real determinant of the invariant block
// changing sign. The time-local generator diverges inside such intervals.
void flag_zero_crossings(const std::vector<Superoperator>& maps, const EigenoperatorBasis& basis,
                         std::vector<bool>& singular);

struct CoefficientFit {
    RealVector c;
    SourceDrainRaw raw;
    CoefficientSet coefficients;
    Vector a;            // a_alpha = tr(F_alpha^dagger L[F_alpha])
    Matrix b;            // b(n, i) = tr(Pi_i L[Pi_n])
    double residual{0.0};
    double imag_residue{0.0};
    double block_residual{0.0};
};

// Invert the symmetric structure: read a_alpha, b_ni off L and solve for c and p.
// Throws SymmetryViolation when the block residual exceeds block_tol * max(1, max|M|).
CoefficientFit fit_coefficients_from_generator(const Superoperator& l, const EigenoperatorBasis& basis,
                                               double block_tol = 1e-6);

} // namespace symstruct
