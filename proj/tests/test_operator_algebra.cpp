// test_operator_algebra.cpp: operator and superoperator algebra

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "symstruct/operator_algebra.hpp"
#include "test_helpers.hpp"

using namespace symstruct;
using namespace testing_support;

TEST_CASE("tensor_product follows system-first ordering")
{
    CHECK(max_abs(ops::tensor_product(ops::identity(2), ops::identity(2)) - ops::identity(4)) == 0.0);

    Matrix expected = Matrix::Zero(4, 4);
    expected.diagonal() << 1.0, 1.0, -1.0, -1.0;
    CHECK(max_abs(ops::tensor_product(ops::pauli_z(), ops::identity(2)) - expected) == 0.0);

    // sigma_+ kron b on a two-level boson: only <e,0| . |g,1> is nonzero.
    const Matrix sb = ops::tensor_product(ops::sigma_plus(), ops::annihilation(2));
    const Index e0 = 0 * 2 + 0;
    const Index g1 = 1 * 2 + 1;
    CHECK(sb(e0, g1) == cplx(1.0, 0.0));
    CHECK(sb.cwiseAbs().sum() == doctest::Approx(1.0));
}

TEST_CASE("partial_trace_env")
{
    std::mt19937_64 rng(11);
    const Matrix rs = random_density(rng, 3);
    const Matrix re = random_density(rng, 4);
    CHECK(max_abs(ops::partial_trace_env(ops::tensor_product(rs, re), 3, 4) - rs) < 1e-14);

    Vector phi = Vector::Zero(4);
    phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
    const DensityOperator bell(phi * phi.adjoint());
    const DensityOperator red = ops::partial_trace_env(bell, 2, 2);
    CHECK(max_abs(red.matrix() - 0.5 * ops::identity(2)) < 1e-15);

    // Resonant JC, vacuum, |e,0> at gt = pi/2 ends in |g><g|.
    const double g = 0.7;
    const Index levels = 3;
    const Matrix b = ops::annihilation(levels);
    const Matrix h = g * (ops::tensor_product(ops::sigma_plus(), b) + ops::tensor_product(ops::sigma_minus(), b.adjoint()));
    const Matrix u = ops::matrix_exponential(h, cplx(0.0, -std::numbers::pi / (2.0 * g)));
    Vector psi = Vector::Zero(2 * levels);
    psi(0) = 1.0;
    const Vector out = u * psi;
    const Matrix rho_s = ops::partial_trace_env(Matrix(out * out.adjoint()), 2, levels);
    CHECK(max_abs(rho_s - ops::basis_projector(2, 1, 1)) < 1e-12);

    CHECK_THROWS_AS(ops::partial_trace_env(Matrix::Identity(6, 6), 4, 2), InvalidArgument);

    const Matrix big = random_density(rng, 12);
    CHECK(std::abs(ops::partial_trace_env(big, 3, 4).trace() - big.trace()) < 1e-13);
}

TEST_CASE("hs_inner")
{
    CHECK(ops::hs_inner(ops::pauli_z(), ops::pauli_z()) == cplx(2.0, 0.0));
    CHECK(std::abs(ops::hs_inner(ops::pauli_x(), ops::pauli_y())) == 0.0);
    const Matrix f = ops::basis_projector(2, 0, 1);
    CHECK(ops::hs_inner(f, f) == cplx(1.0, 0.0));
    CHECK_THROWS_AS(ops::hs_inner(ops::identity(2), ops::identity(3)), InvalidArgument);
}

TEST_CASE("matrix_exponential")
{
    std::mt19937_64 rng(3);
    const Matrix a = random_matrix(rng, 4, 4);
    CHECK(max_abs(ops::matrix_exponential(a, 0.0) - ops::identity(4)) < 1e-15);

    const Matrix rot = ops::matrix_exponential(ops::pauli_x(), cplx(0.0, -std::numbers::pi / 2.0));
    CHECK(max_abs(rot - cplx(0.0, -1.0) * ops::pauli_x()) < 1e-15);

    // Non-Hermitian input goes through scaling and squaring: nilpotent check exp(N) = I + N.
    Matrix nil = Matrix::Zero(3, 3);
    nil(0, 1) = 2.0;
    nil(1, 2) = cplx(0.0, 1.0);
    const Matrix expected = ops::identity(3) + nil + 0.5 * nil * nil;
    CHECK(max_abs(ops::matrix_exponential(nil, 1.0) - expected) < 1e-14);

    // Spin-star K = 1 at 2gt = pi/2: coherences of the central spin vanish.
    const double g = 0.3;
    const Matrix hse = 2.0 * g * (ops::tensor_product(ops::sigma_plus(), ops::sigma_minus()) +
                                  ops::tensor_product(ops::sigma_minus(), ops::sigma_plus()));
    const Matrix u = ops::matrix_exponential(hse, cplx(0.0, -std::numbers::pi / (4.0 * g)));
    Matrix plus(2, 2);
    plus << 0.5, 0.5, 0.5, 0.5;
    const Matrix joint = u * ops::tensor_product(plus, 0.5 * ops::identity(2)) * u.adjoint();
    CHECK(std::abs(ops::partial_trace_env(joint, 2, 2)(0, 1)) < 1e-12);

    for (int rep = 0; rep < 5; ++rep) {
        const Matrix h = random_hermitian(rng, 6);
        const double t = 100.0 / ops::operator_norm(h);
        const Matrix uu = ops::matrix_exponential(h, cplx(0.0, -t));
        CHECK(max_abs(uu.adjoint() * uu - ops::identity(6)) < 1e-11);
    }
    CHECK_THROWS_AS(ops::matrix_exponential(Matrix::Zero(2, 3), 1.0), InvalidArgument);
}

TEST_CASE("vectorization and sandwich")
{
    std::mt19937_64 rng(5);
    const Matrix x = random_matrix(rng, 4, 4);
    CHECK(max_abs(ops::devec(ops::vec(x), 4) - x) == 0.0);

    const Matrix a = random_matrix(rng, 4, 4);
    const Matrix b = random_matrix(rng, 4, 4);
    CHECK(max_abs(ops::superop_sandwich(a, b).apply(x) - a * x * b.adjoint()) < 1e-13);
    CHECK(max_abs(ops::left_multiply(a).apply(x) - a * x) < 1e-13);
    CHECK(max_abs(ops::right_multiply(b).apply(x) - x * b) < 1e-13);

    CHECK(max_abs(ops::superop_sandwich(ops::identity(3), ops::identity(3)).matrix() - ops::identity(9)) == 0.0);
    CHECK(max_abs(ops::superop_sandwich(ops::pauli_z(), ops::pauli_z()).apply(ops::pauli_x()) + ops::pauli_x()) == 0.0);
    const Matrix ee = ops::basis_projector(2, 0, 0);
    const Matrix gg = ops::basis_projector(2, 1, 1);
    CHECK(max_abs(ops::superop_sandwich(ops::sigma_minus(), ops::sigma_minus()).apply(ee) - gg) == 0.0);
    CHECK_THROWS_AS(ops::superop_sandwich(ops::identity(2), ops::identity(3)), InvalidArgument);
}

TEST_CASE("choi_matrix")
{
    const Matrix id_choi = ops::choi_matrix(Superoperator::identity(3));
    Vector omega = Vector::Zero(9);
    for (Index i = 0; i < 3; ++i) omega(i * 3 + i) = 1.0;
    CHECK(max_abs(id_choi - omega * omega.adjoint()) == 0.0);
    CHECK(std::abs(id_choi.trace() - 3.0) == 0.0);
    CHECK(max_abs(ops::partial_trace_env(id_choi, 3, 3) - ops::identity(3)) == 0.0);

    // Completely depolarizing map X -> tr(X) I / N.
    const Index n = 3;
    Matrix dep = Matrix::Zero(n * n, n * n);
    for (Index i = 0; i < n; ++i) {
        for (Index k = 0; k < n; ++k) dep(k + k * n, i + i * n) = 1.0 / static_cast<double>(n);
    }
    const Matrix c = ops::choi_matrix(Superoperator(n, dep));
    CHECK(max_abs(c - ops::identity(9) / 3.0) < 1e-15);

    // Amplitude-damping-like qubit map from Bloch functions at gt = pi/4 (vacuum JC form).
    const double eta_perp = std::cos(std::numbers::pi / 4.0);
    const double eta_par = eta_perp * eta_perp;
    const double r = eta_par - 1.0;
    Matrix m = Matrix::Zero(4, 4);
    // rho_ee' = ((1 + r) tr + eta_par (ee - gg)) / 2 ; rho_gg' = tr - rho_ee'
    m(0, 0) = 0.5 * (1.0 + r + eta_par);
    m(0, 3) = 0.5 * (1.0 + r - eta_par);
    m(3, 0) = 1.0 - m(0, 0);
    m(3, 3) = 1.0 - m(0, 3);
    m(1, 1) = eta_perp;
    m(2, 2) = eta_perp;
    Eigen::SelfAdjointEigenSolver<Matrix> es(ops::choi_matrix(Superoperator(2, m)));
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
}

TEST_CASE("trace_norm")
{
    CHECK(ops::trace_norm(ops::pauli_x()) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(ops::trace_norm(ops::basis_projector(2, 0, 1)) == doctest::Approx(1.0).epsilon(1e-15));
    const double eta = std::cos(0.8);
    CHECK(ops::trace_norm(eta * ops::sigma_plus()) == doctest::Approx(std::abs(eta)).epsilon(1e-14));

    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 5; ++rep) {
        const Matrix x = random_matrix(rng, 5, 5);
        const Matrix u = random_unitary(rng, 5);
        const Matrix v = random_unitary(rng, 5);
        CHECK(std::abs(ops::trace_norm(u * x * v) - ops::trace_norm(x)) < 1e-12);
    }
}

TEST_CASE("value types validate their invariants")
{
    CHECK_THROWS_AS(DensityOperator{ops::pauli_x()}, InvalidArgument);
    CHECK_THROWS_AS(DensityOperator{ops::identity(2)}, InvalidArgument);
    Matrix neg(2, 2);
    neg << 1.5, 0.0, 0.0, -0.5;
    CHECK_THROWS_AS(DensityOperator{neg}, InvalidArgument);
    Matrix bad = 0.5 * ops::identity(2);
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(DensityOperator{bad}, InvalidArgument);
    CHECK_NOTHROW(DensityOperator{0.5 * ops::identity(2)});

    CHECK_THROWS_AS(TimeGrid({0.0, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(TimeGrid({-1.0, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(Superoperator(2, Matrix::Zero(3, 3)), InvalidArgument);
    const TimeGrid g = TimeGrid::uniform(0.0, 1.0, 11);
    CHECK(g.size() == 11);
    CHECK(g.is_uniform());
    CHECK(g.back() == 1.0);
    CHECK(!TimeGrid({0.0, 0.1, 0.5}).is_uniform());
}
