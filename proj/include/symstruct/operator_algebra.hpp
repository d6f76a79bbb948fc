// operator_algebra.hpp: dense operator and superoperator arithmetic
//
// Conventions used throughout the library:
//   * hbar = 1, Hamiltonian entries are angular frequencies;
//   * column-stacking vectorization, vec(A X B) = (B^T kron A) vec(X);
//   * composite spaces are ordered system first, environment second.

#pragma once

#include <vector>

#include "symstruct/types.hpp"

namespace symstruct {

// Validated density operator (Hermitian, unit trace, positive semidefinite).
class DensityOperator {
public:
    explicit DensityOperator(Matrix rho, double tol = 1e-10);

    const Matrix& matrix() const { return rho_; }
    Index dim() const { return rho_.rows(); }
    double tolerance() const { return tol_; }

private:
    Matrix rho_;
    double tol_;
};

// Linear map on N x N operators, stored as an N^2 x N^2 matrix acting on vec(X).
class Superoperator {
public:
    Superoperator() = default;
    Superoperator(Index dim, Matrix matrix);

    static Superoperator identity(Index dim);
    static Superoperator zero(Index dim);

    Index dim() const { return dim_; }
    const Matrix& matrix() const { return matrix_; }

    Matrix apply(const Matrix& x) const;

    Superoperator operator*(const Superoperator& rhs) const;
    Superoperator operator+(const Superoperator& rhs) const;
    Superoperator operator-(const Superoperator& rhs) const;
    Superoperator operator*(cplx s) const;

private:
    Index dim_{0};
    Matrix matrix_;
};

// Strictly increasing, non-negative sample times.
class TimeGrid {
public:
    TimeGrid() = default;
    explicit TimeGrid(std::vector<double> points);

    // n_points equally spaced samples on [t0, t1]; n_points == 1 yields {t0}.
    static TimeGrid uniform(double t0, double t1, std::size_t n_points);

    std::size_t size() const { return points_.size(); }
    double operator[](std::size_t i) const { return points_[i]; }
    const std::vector<double>& points() const { return points_; }
    double front() const { return points_.front(); }
    double back() const { return points_.back(); }
    bool is_uniform(double rel_tol = 1e-12) const;

private:
    std::vector<double> points_;
};

namespace ops {

Matrix identity(Index n);
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
Matrix sigma_plus();   // |e><g| with |e> at index 0
Matrix sigma_minus();  // |g><e|
Matrix annihilation(Index levels);
Matrix basis_projector(Index n, Index i, Index j);  // |i><j|

bool all_finite(const Matrix& a);
bool is_hermitian(const Matrix& a, double tol);
double hermiticity_residual(const Matrix& a);
Matrix commutator(const Matrix& a, const Matrix& b);
Matrix anticommutator(const Matrix& a, const Matrix& b);
double operator_norm(const Matrix& a);

Matrix tensor_product(const Matrix& a, const Matrix& b);
Matrix partial_trace_env(const Matrix& rho, Index n_sys, Index n_env);
DensityOperator partial_trace_env(const DensityOperator& rho, Index n_sys, Index n_env);

cplx hs_inner(const Matrix& a, const Matrix& b);

// exp(scale * a); Hermitian a uses an eigendecomposition, otherwise Pade scaling and squaring.
Matrix matrix_exponential(const Matrix& a, cplx scale);

Vector vec(const Matrix& x);
Matrix devec(const Vector& v, Index n);

// X -> A X B^dagger
Superoperator superop_sandwich(const Matrix& a, const Matrix& b);
// X -> A X
Superoperator left_multiply(const Matrix& a);
// X -> X B
Superoperator right_multiply(const Matrix& b);
// X -> -i [H, X]
Superoperator hamiltonian_superop(const Matrix& h);
// X -> A X B^dagger - 1/2 {B^dagger A, X}
Superoperator dissipator(const Matrix& a, const Matrix& b);

// Choi matrix sum_ij |i><j| kron L(|i><j|), input factor first.
Matrix choi_matrix(const Superoperator& map);

double trace_norm(const Matrix& a);

} // namespace ops

} // namespace symstruct
