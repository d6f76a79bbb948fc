// generator_core.cpp: generator assembly, propagation, exact maps and generator extraction

#include "symstruct/generator_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "symstruct/parallel.hpp"

namespace symstruct {

namespace {

double max_abs(const Matrix& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void check_sizes(const CoefficientSet& cs, Index n)
{
    if (cs.c.size() != n * (n - 1)) throw InvalidArgument("coefficients: c has wrong length");
    if (cs.d.rows() != n - 1 || cs.d.cols() != n - 1) throw InvalidArgument("coefficients: d has wrong shape");
    if (cs.hbar.rows() != n || cs.hbar.cols() != n) throw InvalidArgument("coefficients: hbar has wrong shape");
}

// First-derivative finite-difference weights at x0 on arbitrary nodes (Fornberg recursion).
std::vector<double> derivative_weights(const std::vector<double>& x, double x0)
{
    const std::size_t n = x.size();
    std::vector<std::vector<double>> c(n, std::vector<double>(2, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t mn = std::min<std::size_t>(i, 1);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k) {
                    c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k) {
                c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = c[i][1];
    return w;
}

double superop_norm(const Matrix& m)
{
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

// Row functional X -> tr X on vec(X).
Eigen::RowVectorXcd trace_row(Index n)
{
    return ops::vec(Matrix::Identity(n, n)).transpose();
}

// Classical RK4 over the grid with linearly interpolated generators; calls emit(k, y) at every
// grid point. trace_error(y) returns the deviation from the conserved trace.
template <class State, class Emit, class TraceError>
void rk4_over_grid(const std::vector<Matrix>& gens, const TimeGrid& grid, State y,
                   const PropagationOptions& opt, Emit&& emit, TraceError&& trace_error)
{
    emit(std::size_t{0}, y);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const Matrix& l0 = gens[k];
        const Matrix& l1 = gens[k + 1];
        const double dt = grid[k + 1] - grid[k];
        const double norm = std::max(superop_norm(l0), superop_norm(l1));
        const double raw_steps = std::max(1.0, std::ceil(norm * dt / opt.norm_step));
        if (!(raw_steps <= 1e7)) {
            throw NumericalFailure("propagate: generator norm too large for the grid (step too large)");
        }
        const auto steps = static_cast<long>(raw_steps);
        const double h = dt / static_cast<double>(steps);
        auto at = [&](double s) -> Matrix { return (1.0 - s) * l0 + s * l1; };
        for (long i = 0; i < steps; ++i) {
            const double s0 = static_cast<double>(i) / static_cast<double>(steps);
            const double sm = (static_cast<double>(i) + 0.5) / static_cast<double>(steps);
            const double s1 = static_cast<double>(i + 1) / static_cast<double>(steps);
            const Matrix la = at(s0);
            const Matrix lm = at(sm);
            const Matrix lb = at(s1);
            const State k1 = la * y;
            const State k2 = lm * (y + 0.5 * h * k1);
            const State k3 = lm * (y + 0.5 * h * k2);
            const State k4 = lb * (y + h * k3);
            y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        if (!(trace_error(y) <= opt.trace_drift)) {
            throw NumericalFailure("propagate: trace drift exceeds " + std::to_string(opt.trace_drift) +
                                   " at t = " + std::to_string(grid[k + 1]) + " (step too large)");
        }
        emit(k + 1, y);
    }
}

std::vector<Matrix> generator_matrices(const KineticCoefficients& coeffs, const EigenoperatorBasis& basis)
{
    std::vector<Matrix> gens;
    gens.reserve(coeffs.size());
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        if (k < coeffs.singular.size() && coeffs.singular[k]) {
            throw NumericalFailure("propagate: coefficients are singular at t = " + std::to_string(coeffs.grid[k]));
        }
        gens.push_back(assemble_generator(coeffs.values[k], basis).matrix());
    }
    return gens;
}

} // namespace

CoefficientSet CoefficientSet::zero(Index n)
{
    return {RealVector::Zero(n * (n - 1)), Matrix::Zero(n - 1, n - 1), Matrix::Zero(n, n)};
}

void KineticCoefficients::validate(Index n, double tol) const
{
    if (values.size() != grid.size()) throw InvalidArgument("KineticCoefficients: size differs from grid");
    if (!singular.empty() && singular.size() != grid.size()) {
        throw InvalidArgument("KineticCoefficients: singular mask size differs from grid");
    }
    for (const auto& v : values) {
        check_sizes(v, n);
        if (!v.c.allFinite() || !v.d.allFinite() || !v.hbar.allFinite()) {
            throw InvalidArgument("KineticCoefficients: non-finite entries");
        }
        if (ops::hermiticity_residual(v.d) > tol * std::max(1.0, max_abs(v.d))) {
            throw InvalidArgument("KineticCoefficients: d is not Hermitian");
        }
        if (ops::hermiticity_residual(v.hbar) > tol * std::max(1.0, max_abs(v.hbar)) ||
            std::abs(v.hbar.trace()) > tol * std::max(1.0, max_abs(v.hbar))) {
            throw InvalidArgument("KineticCoefficients: hbar is not Hermitian and traceless");
        }
    }
}

Superoperator assemble_generator(const CoefficientSet& coeffs, const EigenoperatorBasis& basis)
{
    const Index n = basis.dim();
    check_sizes(coeffs, n);
    if (ops::hermiticity_residual(coeffs.d) > 1e-12 * std::max(1.0, max_abs(coeffs.d))) {
        throw InvalidArgument("assemble_generator: d is not Hermitian");
    }
    Matrix l = ops::hamiltonian_superop(coeffs.hbar).matrix();
    for (Index a = 0; a < basis.num_transitions(); ++a) {
        if (coeffs.c(a) == 0.0) continue;
        const Matrix& f = basis.transition_op(a);
        l += coeffs.c(a) * ops::dissipator(f, f).matrix();
    }
    for (Index i = 0; i + 1 < n; ++i) {
        for (Index j = 0; j + 1 < n; ++j) {
            if (coeffs.d(i, j) == cplx(0.0, 0.0)) continue;
            l += coeffs.d(i, j) * ops::dissipator(basis.diagonal_op(i), basis.diagonal_op(j)).matrix();
        }
    }
    return Superoperator(n, std::move(l));
}

Superoperator assemble_generator(const KineticCoefficients& coeffs, const EigenoperatorBasis& basis,
                                 std::size_t t_index)
{
    if (t_index >= coeffs.size()) throw InvalidArgument("assemble_generator: time index out of range");
    if (t_index < coeffs.singular.size() && coeffs.singular[t_index]) {
        throw NumericalFailure("assemble_generator: coefficients are singular at this time");
    }
    return assemble_generator(coeffs.values[t_index], basis);
}

GklsForm raw_to_gkls(const SourceDrainRaw& raw, const EigenoperatorBasis& basis)
{
    const Index n = basis.dim();
    if (raw.p.rows() != n || raw.p.cols() != n) throw InvalidArgument("raw_to_gkls: p has wrong shape");
    if (ops::hermiticity_residual(raw.p) > 1e-12 * std::max(1.0, max_abs(raw.p))) {
        throw InvalidArgument("raw_to_gkls: p is not Hermitian");
    }
    const Matrix o = basis.gellmann_transform().cast<cplx>();
    const Matrix full = o * raw.p * o.transpose();
    const double rn = std::sqrt(static_cast<double>(n));

    Matrix phat = Matrix::Zero(n, n);
    for (Index i = 0; i + 1 < n; ++i) phat += full(i, n - 1) * basis.diagonal_op(i);
    phat /= rn;

    GklsForm out;
    out.d = full.topLeftCorner(n - 1, n - 1);
    out.d = 0.5 * (out.d + out.d.adjoint());
    out.hbar = (phat.adjoint() - phat) / (2.0 * kI);
    out.hbar = 0.5 * (out.hbar + out.hbar.adjoint());
    Matrix g = full(n - 1, n - 1) / (2.0 * static_cast<double>(n)) * Matrix::Identity(n, n) +
               0.5 * (phat + phat.adjoint());
    for (Index i = 0; i + 1 < n; ++i) {
        for (Index j = 0; j + 1 < n; ++j) {
            g += 0.5 * out.d(i, j) * basis.diagonal_op(j) * basis.diagonal_op(i);
        }
    }
    out.trace_defect = g;
    return out;
}

Superoperator source_drain_superop(const SourceDrainRaw& raw, const EigenoperatorBasis& basis)
{
    const Index n = basis.dim();
    if (raw.p.rows() != n || raw.p.cols() != n) throw InvalidArgument("source_drain_superop: p has wrong shape");
    Superoperator s = Superoperator::zero(n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            s = s + ops::superop_sandwich(basis.projector(i), basis.projector(j)) * raw.p(i, j);
        }
    }
    return s;
}

void Trajectory::add_observable(const std::string& name, const Matrix& o)
{
    std::vector<double> series;
    series.reserve(states.size());
    for (const auto& rho : states) series.push_back((o * rho).trace().real());
    observables[name] = std::move(series);
}

double Trajectory::max_state_violation() const
{
    double worst = 0.0;
    for (const auto& rho : states) {
        worst = std::max(worst, ops::hermiticity_residual(rho));
        worst = std::max(worst, std::abs(rho.trace() - cplx(1.0, 0.0)));
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
        worst = std::max(worst, -es.eigenvalues().minCoeff());
    }
    return worst;
}

Trajectory propagate(const KineticCoefficients& coeffs, const EigenoperatorBasis& basis,
                     const DensityOperator& rho0, const PropagationOptions& options)
{
    const Index n = basis.dim();
    if (rho0.dim() != n) throw InvalidArgument("propagate: rho0 dimension mismatch");
    coeffs.validate(n);
    const std::vector<Matrix> gens = generator_matrices(coeffs, basis);

    Trajectory traj;
    traj.grid = coeffs.grid;
    traj.states.resize(coeffs.size());
    const cplx tr0 = rho0.matrix().trace();
    rk4_over_grid(
        gens, coeffs.grid, Vector(ops::vec(rho0.matrix())), options,
        [&](std::size_t k, const Vector& y) { traj.states[k] = ops::devec(y, n); },
        [&](const Vector& y) { return std::abs(ops::devec(y, n).trace() - tr0); });
    return traj;
}

std::vector<Superoperator> propagate_map(const KineticCoefficients& coeffs, const EigenoperatorBasis& basis,
                                         const PropagationOptions& options)
{
    const Index n = basis.dim();
    coeffs.validate(n);
    const std::vector<Matrix> gens = generator_matrices(coeffs, basis);
    const Eigen::RowVectorXcd tr = trace_row(n);

    std::vector<Superoperator> maps(coeffs.size());
    rk4_over_grid(
        gens, coeffs.grid, Matrix(Matrix::Identity(n * n, n * n)), options,
        [&](std::size_t k, const Matrix& y) { maps[k] = Superoperator(n, y); },
        [&](const Matrix& y) { return (tr * y - tr).cwiseAbs().maxCoeff(); });
    return maps;
}

std::vector<Superoperator> map_from_joint_unitary(const Matrix& h_joint, const DensityOperator& rho_env,
                                                  Index n_sys, const TimeGrid& grid, int threads,
                                                  JointMapMethod method)
{
    const Index n_env = rho_env.dim();
    const Index dim = h_joint.rows();
    if (n_sys <= 0 || h_joint.cols() != dim || dim != n_sys * n_env) {
        throw InvalidArgument("map_from_joint_unitary: dimension mismatch");
    }
    if (ops::hermiticity_residual(h_joint) > 1e-12 * std::max(1.0, max_abs(h_joint))) {
        throw InvalidArgument("map_from_joint_unitary: joint Hamiltonian is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h_joint + h_joint.adjoint()));
    const RealVector& energy = es.eigenvalues();
    const Matrix& v = es.eigenvectors();
    const Matrix& rho_e = rho_env.matrix();
    const Index n2 = n_sys * n_sys;

    std::vector<Superoperator> maps(grid.size());
    const double entries = static_cast<double>(n2) * static_cast<double>(n2) * static_cast<double>(dim) *
                           static_cast<double>(dim);
    const bool tensor = method == JointMapMethod::SpectralTensor ||
                        (method == JointMapMethod::Auto && entries <= static_cast<double>(1 << 24));
    if (tensor) {
        // Lambda_{(ij),(kl)}(t) = sum_ab p_a W^{ij}_ab Y^{kl}_ab conj(p_b), p_a = exp(-i E_a t).
        std::vector<Matrix> w(static_cast<std::size_t>(n2));
        std::vector<Matrix> y(static_cast<std::size_t>(n2));
        for (Index j = 0; j < n_sys; ++j) {
            for (Index i = 0; i < n_sys; ++i) {
                const Matrix vi = v.middleRows(i * n_env, n_env);
                const Matrix vj = v.middleRows(j * n_env, n_env);
                w[static_cast<std::size_t>(i + j * n_sys)] = vi.transpose() * vj.conjugate();
                y[static_cast<std::size_t>(i + j * n_sys)] = vi.adjoint() * rho_e * vj;
            }
        }
        std::vector<Matrix> g(static_cast<std::size_t>(n2 * n2));
        for (Index r = 0; r < n2; ++r) {
            for (Index c = 0; c < n2; ++c) {
                g[static_cast<std::size_t>(r + c * n2)] =
                    w[static_cast<std::size_t>(r)].cwiseProduct(y[static_cast<std::size_t>(c)]);
            }
        }
        parallel_for(grid.size(), threads, [&](std::size_t k) {
            const Vector p = (cplx(0.0, -grid[k]) * energy.cast<cplx>()).array().exp();
            const Vector pc = p.conjugate();
            Matrix m(n2, n2);
            for (Index r = 0; r < n2; ++r) {
                for (Index c = 0; c < n2; ++c) {
                    m(r, c) = (p.array() * (g[static_cast<std::size_t>(r + c * n2)] * pc).array()).sum();
                }
            }
            maps[k] = Superoperator(n_sys, std::move(m));
        });
    } else {
        parallel_for(grid.size(), threads, [&](std::size_t k) {
            const Vector p = (cplx(0.0, -grid[k]) * energy.cast<cplx>()).array().exp();
            const Matrix u = v * p.asDiagonal() * v.adjoint();
            Matrix m(n2, n2);
            for (Index l = 0; l < n_sys; ++l) {
                for (Index kk = 0; kk < n_sys; ++kk) {
                    // U (|k><l| kron rho_E) U^dagger = A B^dagger, A = U_{:,k} rho_E, B = U_{:,l}.
                    const Matrix a = u.middleCols(kk * n_env, n_env) * rho_e;
                    const Matrix b = u.middleCols(l * n_env, n_env);
                    Matrix out(n_sys, n_sys);
                    for (Index i = 0; i < n_sys; ++i) {
                        for (Index j = 0; j < n_sys; ++j) {
                            out(i, j) = (a.middleRows(i * n_env, n_env).cwiseProduct(
                                             b.middleRows(j * n_env, n_env).conjugate()))
                                            .sum();
                        }
                    }
                    m.col(kk + l * n_sys) = ops::vec(out);
                }
            }
            maps[k] = Superoperator(n_sys, std::move(m));
        });
    }
    return maps;
}

GeneratorSeries extract_generator(const std::vector<Superoperator>& maps, const TimeGrid& grid, double cond_limit)
{
    const std::size_t n = grid.size();
    if (maps.size() != n) throw InvalidArgument("extract_generator: maps and grid differ in size");
    if (n < 3) throw InvalidArgument("extract_generator: at least 3 grid points required");
    const Index dim = maps.front().dim();
    const std::size_t width = std::min<std::size_t>(5, n);

    GeneratorSeries out;
    out.generators.resize(n);
    out.condition.resize(n);
    out.singular.assign(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t start = std::min(k >= 2 ? k - 2 : 0, n - width);
        std::vector<double> nodes(grid.points().begin() + static_cast<std::ptrdiff_t>(start),
                                  grid.points().begin() + static_cast<std::ptrdiff_t>(start + width));
        const std::vector<double> w = derivative_weights(nodes, grid[k]);
        Matrix deriv = Matrix::Zero(dim * dim, dim * dim);
        for (std::size_t j = 0; j < width; ++j) deriv += w[j] * maps[start + j].matrix();

        const Matrix& lam = maps[k].matrix();
        Eigen::JacobiSVD<Matrix> svd(lam);
        const auto& sv = svd.singularValues();
        const double smin = sv(sv.size() - 1);
        out.condition[k] = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
        if (!(out.condition[k] <= cond_limit)) {
            out.singular[k] = true;
            continue;
        }
        Eigen::FullPivLU<Matrix> lu(lam);
        out.generators[k] = Superoperator(dim, deriv * lu.inverse());
    }
    return out;
}

void flag_zero_crossings(const std::vector<Superoperator>& maps, const EigenoperatorBasis& basis,
                         std::vector<bool>& singular)
{
    if (singular.size() != maps.size()) throw InvalidArgument("flag_zero_crossings: mask size differs from maps");
    std::vector<Vector> lambdas;
    std::vector<double> dets;
    lambdas.reserve(maps.size());
    for (const auto& m : maps) {
        const BlockStructure bs = verify_block_structure(m, basis);
        lambdas.push_back(bs.transition_eigenvalues);
        dets.push_back(bs.invariant_block.real().determinant());
    }
    for (std::size_t k = 0; k + 1 < maps.size(); ++k) {
        bool crossing = dets[k] * dets[k + 1] < 0.0;
        for (Index a = 0; a < lambdas[k].size() && !crossing; ++a) {
            crossing = (lambdas[k](a) * std::conj(lambdas[k + 1](a))).real() < 0.0;
        }
        if (crossing) {
            singular[k] = true;
            singular[k + 1] = true;
        }
    }
}

CoefficientFit fit_coefficients_from_generator(const Superoperator& l, const EigenoperatorBasis& basis,
                                               double block_tol)
{
    const Index n = basis.dim();
    const Index nt = basis.num_transitions();
    const BlockStructure bs = verify_block_structure(l, basis);
    const double scale = std::max(1.0, max_abs(bs.s_matrix));
    CoefficientFit fit;
    fit.block_residual = std::max(bs.f_offdiag, bs.f_pi_coupling) / scale;
    if (fit.block_residual > block_tol) {
        throw SymmetryViolation("fit_coefficients_from_generator: generator breaks the symmetry (residual " +
                                std::to_string(fit.block_residual) + ")");
    }
    fit.a = bs.transition_eigenvalues;
    fit.b = bs.invariant_block.transpose();

    // Unknowns: c_alpha (alpha over transitions), then p in column-major order.
    const Index unknowns = nt + n * n;
    Matrix a = Matrix::Zero(unknowns, unknowns);
    Vector rhs = Vector::Zero(unknowns);
    auto p_col = [&](Index i, Index j) { return nt + i + j * n; };
    Index row = 0;
    for (Index alpha = 0; alpha < nt; ++alpha, ++row) {
        const Transition& t = basis.transitions()[static_cast<std::size_t>(alpha)];
        a(row, p_col(t.n, t.m)) = 1.0;
        for (Index s = 0; s < n; ++s) {
            if (s != t.n) a(row, basis.transition_index(s, t.n)) -= 0.5;
            if (s != t.m) a(row, basis.transition_index(s, t.m)) -= 0.5;
        }
        rhs(row) = fit.a(alpha);
    }
    for (Index nn = 0; nn < n; ++nn) {
        for (Index i = 0; i < n; ++i) {
            if (i == nn) continue;
            a(row, basis.transition_index(i, nn)) = 1.0;
            rhs(row) = fit.b(nn, i);
            ++row;
        }
    }
    for (Index nn = 0; nn < n; ++nn, ++row) {
        a(row, p_col(nn, nn)) = 1.0;
        for (Index i = 0; i < n; ++i) {
            if (i != nn) a(row, basis.transition_index(i, nn)) = -1.0;
        }
        rhs(row) = fit.b(nn, nn);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(a);
    if (qr.rank() < unknowns) throw NumericalFailure("fit_coefficients_from_generator: singular linear system");
    const Vector x = qr.solve(rhs);
    fit.residual = (a * x - rhs).norm();

    fit.c = x.head(nt).real();
    fit.raw.p = Eigen::Map<const Matrix>(x.data() + nt, n, n);
    const Matrix anti = 0.5 * (fit.raw.p - fit.raw.p.adjoint());
    fit.imag_residue = std::max(nt > 0 ? x.head(nt).imag().cwiseAbs().maxCoeff() : 0.0, max_abs(anti));
    fit.raw.p = 0.5 * (fit.raw.p + fit.raw.p.adjoint());

    const GklsForm g = raw_to_gkls(fit.raw, basis);
    fit.coefficients = {fit.c, g.d, g.hbar};
    return fit;
}

} // namespace symstruct
