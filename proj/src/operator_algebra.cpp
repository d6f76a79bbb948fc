// operator_algebra.cpp: dense operator and superoperator arithmetic

#include "symstruct/operator_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace symstruct {

namespace {

void require_square(const Matrix& a, const char* what)
{
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw InvalidArgument(std::string(what) + ": matrix must be square and non-empty");
    }
}

} // namespace

DensityOperator::DensityOperator(Matrix rho, double tol) : rho_(std::move(rho)), tol_(tol)
{
    require_square(rho_, "DensityOperator");
    if (!ops::all_finite(rho_)) {
        throw InvalidArgument("DensityOperator: non-finite entries");
    }
    if (ops::hermiticity_residual(rho_) > tol_) {
        throw InvalidArgument("DensityOperator: matrix is not Hermitian");
    }
    if (std::abs(rho_.trace() - cplx(1.0, 0.0)) > tol_) {
        throw InvalidArgument("DensityOperator: trace differs from 1");
    }
    const Matrix herm = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol_) {
        throw InvalidArgument("DensityOperator: matrix is not positive semidefinite");
    }
}

Superoperator::Superoperator(Index dim, Matrix matrix) : dim_(dim), matrix_(std::move(matrix))
{
    if (dim_ <= 0 || matrix_.rows() != dim_ * dim_ || matrix_.cols() != dim_ * dim_) {
        throw InvalidArgument("Superoperator: matrix must be N^2 x N^2");
    }
}

Superoperator Superoperator::identity(Index dim)
{
    return Superoperator(dim, Matrix::Identity(dim * dim, dim * dim));
}

Superoperator Superoperator::zero(Index dim)
{
    return Superoperator(dim, Matrix::Zero(dim * dim, dim * dim));
}

Matrix Superoperator::apply(const Matrix& x) const
{
    if (x.rows() != dim_ || x.cols() != dim_) {
        throw InvalidArgument("Superoperator::apply: dimension mismatch");
    }
    return ops::devec(matrix_ * ops::vec(x), dim_);
}

Superoperator Superoperator::operator*(const Superoperator& rhs) const
{
    if (rhs.dim_ != dim_) throw InvalidArgument("Superoperator: dimension mismatch");
    return Superoperator(dim_, matrix_ * rhs.matrix_);
}

Superoperator Superoperator::operator+(const Superoperator& rhs) const
{
    if (rhs.dim_ != dim_) throw InvalidArgument("Superoperator: dimension mismatch");
    return Superoperator(dim_, matrix_ + rhs.matrix_);
}

Superoperator Superoperator::operator-(const Superoperator& rhs) const
{
    if (rhs.dim_ != dim_) throw InvalidArgument("Superoperator: dimension mismatch");
    return Superoperator(dim_, matrix_ - rhs.matrix_);
}

Superoperator Superoperator::operator*(cplx s) const
{
    return Superoperator(dim_, matrix_ * s);
}

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points))
{
    if (points_.empty()) throw InvalidArgument("TimeGrid: no points");
    if (!std::isfinite(points_.front()) || points_.front() < 0.0) {
        throw InvalidArgument("TimeGrid: first point must be finite and >= 0");
    }
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i]) || !(points_[i] > points_[i - 1])) {
            throw InvalidArgument("TimeGrid: points must be strictly increasing");
        }
    }
}

TimeGrid TimeGrid::uniform(double t0, double t1, std::size_t n_points)
{
    if (n_points == 0) throw InvalidArgument("TimeGrid::uniform: n_points must be >= 1");
    if (n_points == 1) return TimeGrid({t0});
    if (!(t1 > t0)) throw InvalidArgument("TimeGrid::uniform: t1 must exceed t0");
    std::vector<double> pts(n_points);
    const double h = (t1 - t0) / static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) pts[i] = t0 + h * static_cast<double>(i);
    pts.back() = t1;
    return TimeGrid(std::move(pts));
}

bool TimeGrid::is_uniform(double rel_tol) const
{
    if (points_.size() < 3) return true;
    const double h = (points_.back() - points_.front()) / static_cast<double>(points_.size() - 1);
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (std::abs(points_[i] - points_[i - 1] - h) > rel_tol * std::max(1.0, h) + 1e-15 * points_.back()) {
            return false;
        }
    }
    return true;
}

namespace ops {

Matrix identity(Index n) { return Matrix::Identity(n, n); }

Matrix pauli_x()
{
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

Matrix pauli_y()
{
    Matrix m(2, 2);
    m << 0.0, -kI, kI, 0.0;
    return m;
}

Matrix pauli_z()
{
    Matrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

Matrix sigma_plus()
{
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

Matrix sigma_minus() { return sigma_plus().transpose(); }

Matrix annihilation(Index levels)
{
    if (levels < 1) throw InvalidArgument("annihilation: levels must be >= 1");
    Matrix b = Matrix::Zero(levels, levels);
    for (Index n = 1; n < levels; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
    return b;
}

Matrix basis_projector(Index n, Index i, Index j)
{
    if (i < 0 || j < 0 || i >= n || j >= n) throw InvalidArgument("basis_projector: index out of range");
    Matrix m = Matrix::Zero(n, n);
    m(i, j) = 1.0;
    return m;
}

bool all_finite(const Matrix& a)
{
    return a.allFinite();
}

double hermiticity_residual(const Matrix& a)
{
    if (a.size() == 0) return 0.0;
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& a, double tol)
{
    return a.rows() == a.cols() && hermiticity_residual(a) <= tol;
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Matrix anticommutator(const Matrix& a, const Matrix& b) { return a * b + b * a; }

double operator_norm(const Matrix& a)
{
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

Matrix tensor_product(const Matrix& a, const Matrix& b)
{
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Matrix partial_trace_env(const Matrix& rho, Index n_sys, Index n_env)
{
    if (n_sys <= 0 || n_env <= 0 || rho.rows() != n_sys * n_env || rho.cols() != n_sys * n_env) {
        throw InvalidArgument("partial_trace_env: dimension mismatch");
    }
    Matrix out = Matrix::Zero(n_sys, n_sys);
    for (Index i = 0; i < n_sys; ++i) {
        for (Index j = 0; j < n_sys; ++j) {
            out(i, j) = rho.block(i * n_env, j * n_env, n_env, n_env).trace();
        }
    }
    return out;
}

DensityOperator partial_trace_env(const DensityOperator& rho, Index n_sys, Index n_env)
{
    return DensityOperator(partial_trace_env(rho.matrix(), n_sys, n_env), rho.tolerance());
}

cplx hs_inner(const Matrix& a, const Matrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InvalidArgument("hs_inner: dimension mismatch");
    }
    return (a.conjugate().cwiseProduct(b)).sum();
}

Matrix matrix_exponential(const Matrix& a, cplx scale)
{
    require_square(a, "matrix_exponential");
    const double scale_a = std::max(1.0, a.cwiseAbs().maxCoeff());
    if (hermiticity_residual(a) <= 1e-14 * scale_a) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.adjoint()));
        const Vector phases = (scale * es.eigenvalues().cast<cplx>()).array().exp();
        return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    }
    const Matrix scaled = scale * a;
    return scaled.exp();
}

Vector vec(const Matrix& x)
{
    return Eigen::Map<const Vector>(x.data(), x.size());
}

Matrix devec(const Vector& v, Index n)
{
    if (n <= 0 || v.size() != n * n) throw InvalidArgument("devec: size mismatch");
    return Eigen::Map<const Matrix>(v.data(), n, n);
}

Superoperator superop_sandwich(const Matrix& a, const Matrix& b)
{
    require_square(a, "superop_sandwich");
    if (b.rows() != a.rows() || b.cols() != a.cols()) {
        throw InvalidArgument("superop_sandwich: dimension mismatch");
    }
    return Superoperator(a.rows(), tensor_product(b.conjugate(), a));
}

Superoperator left_multiply(const Matrix& a)
{
    require_square(a, "left_multiply");
    return Superoperator(a.rows(), tensor_product(identity(a.rows()), a));
}

Superoperator right_multiply(const Matrix& b)
{
    require_square(b, "right_multiply");
    return Superoperator(b.rows(), tensor_product(b.transpose(), identity(b.rows())));
}

Superoperator hamiltonian_superop(const Matrix& h)
{
    return (left_multiply(h) - right_multiply(h)) * cplx(0.0, -1.0);
}

Superoperator dissipator(const Matrix& a, const Matrix& b)
{
    const Matrix bda = b.adjoint() * a;
    return superop_sandwich(a, b) - (left_multiply(bda) + right_multiply(bda)) * cplx(0.5, 0.0);
}

Matrix choi_matrix(const Superoperator& map)
{
    const Index n = map.dim();
    const Matrix& s = map.matrix();
    Matrix choi(n * n, n * n);
    // L(|i><j|)_{kl} = S(k + l n, i + j n), placed at row i n + k, column j n + l.
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            for (Index k = 0; k < n; ++k) {
                for (Index l = 0; l < n; ++l) {
                    choi(i * n + k, j * n + l) = s(k + l * n, i + j * n);
                }
            }
        }
    }
    return choi;
}

double trace_norm(const Matrix& a)
{
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues().sum();
}

} // namespace ops

} // namespace symstruct
