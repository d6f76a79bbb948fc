// symmetry_basis.hpp: eigenoperator bases of a free Hamiltonian and block-structure checks

#pragma once

#include <limits>
#include <vector>

#include "symstruct/operator_algebra.hpp"

namespace symstruct {

// Hermitian system Hamiltonian with a non-degenerate spectrum, eigenvalues ascending.
// Each eigenvector is phase-fixed so that its largest-magnitude component is real positive.
class FreeHamiltonian {
public:
    // level_tol < 0 selects the default 1e-9 * max(1, spectral width).
    explicit FreeHamiltonian(const Matrix& h, double level_tol = -1.0);

    // Hermitian generator G of a unitary with non-degenerate eigenphases, U = exp(-i G),
    // eigenphases taken in (-pi, pi].
    static FreeHamiltonian from_unitary(const Matrix& u, double level_tol = -1.0);

    const Matrix& matrix() const { return h_; }
    const RealVector& energies() const { return energies_; }
    const Matrix& eigenvectors() const { return vectors_; }
    Index dim() const { return h_.rows(); }
    double spectral_width() const { return energies_(energies_.size() - 1) - energies_(0); }

private:
    Matrix h_;
    RealVector energies_;
    Matrix vectors_;
};

// Default Bohr-degeneracy tolerance: 1e-9 relative to the spectral width.
double default_degeneracy_tolerance(const FreeHamiltonian& h);

// F_nm = |n><m| with Bohr frequency omega = e_n - e_m (0-based level indices).
struct Transition {
    Index n{0};
    Index m{0};
    double omega{0.0};
};

// Orthonormal operator basis adapted to the free evolution.
//   S-basis: F_1..F_{N(N-1)} then projectors Pi_1..Pi_N.
//   T-basis: F_1..F_{N(N-1)} then P_1..P_{N-1} (generalized Gell-Mann diagonals) and P_N = I/sqrt(N).
// Transitions are ordered lexicographically in (n, m), n != m.
class EigenoperatorBasis {
public:
    EigenoperatorBasis() = default;
    explicit EigenoperatorBasis(const FreeHamiltonian& h);

    Index dim() const { return dim_; }
    Index num_transitions() const { return static_cast<Index>(transitions_.size()); }

    const std::vector<Transition>& transitions() const { return transitions_; }
    const Matrix& transition_op(Index alpha) const { return transition_ops_[static_cast<std::size_t>(alpha)]; }
    const Matrix& projector(Index j) const { return projectors_[static_cast<std::size_t>(j)]; }
    // P_{i+1} for i = 0..N-1; the last one is I/sqrt(N).
    const Matrix& diagonal_op(Index i) const { return diagonal_ops_[static_cast<std::size_t>(i)]; }
    // Real orthogonal O with P_k = sum_i O(k, i) Pi_i.
    const RealMatrix& gellmann_transform() const { return gellmann_; }

    const Matrix& eigenvectors() const { return vectors_; }
    const RealVector& energies() const { return energies_; }

    Index transition_index(Index n, Index m) const;

    // k-th element of the S-basis.
    const Matrix& s_element(Index k) const;
    // N^2 x N^2 unitary whose columns are vec(S_k).
    const Matrix& s_change_of_basis() const { return s_columns_; }

private:
    Index dim_{0};
    RealVector energies_;
    Matrix vectors_;
    std::vector<Transition> transitions_;
    std::vector<Matrix> transition_ops_;
    std::vector<Matrix> projectors_;
    std::vector<Matrix> diagonal_ops_;
    RealMatrix gellmann_;
    Matrix s_columns_;
};

EigenoperatorBasis build_basis(const FreeHamiltonian& h);

struct BohrSpectrum {
    std::vector<Transition> entries;
    double min_gap{std::numeric_limits<double>::infinity()};
    bool degenerate{false};
};

BohrSpectrum bohr_spectrum(const FreeHamiltonian& h, double tol);

struct LiftedHamiltonian {
    FreeHamiltonian hamiltonian;
    double distance{0.0};  // operator-norm distance to the input Hamiltonian
    int shifts{0};
};

// Shift the highest level involved in a Bohr collision up by epsilon until all
// Bohr frequencies are separated by at least epsilon / 2.
LiftedHamiltonian lift_degeneracy(const FreeHamiltonian& h, double epsilon);

struct AsymmetryMode {
    double omega{0.0};
    Matrix component;
};

// Split X into its non-zero Bohr-frequency components, ascending in omega; the omega = 0 component
// carries the diagonal part. tol < 0 selects 1e-9 * max(1, spectral width).
std::vector<AsymmetryMode> mode_decompose(const Matrix& x, const EigenoperatorBasis& basis,
                                          double tol = -1.0);

struct BlockStructure {
    Matrix s_matrix;          // M(a, b) = tr(S_a^dagger S[S_b])
    double f_offdiag{0.0};    // largest off-diagonal magnitude inside the F block
    double f_pi_coupling{0.0};// largest magnitude coupling F and Pi elements
    Matrix invariant_block;   // N x N, (i, j) = tr(Pi_i S[Pi_j])
    Vector transition_eigenvalues;

    bool symmetric(double tol) const { return f_offdiag <= tol && f_pi_coupling <= tol; }
};

BlockStructure verify_block_structure(const Superoperator& s, const EigenoperatorBasis& basis);

} // namespace symstruct
