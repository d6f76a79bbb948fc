// validators.cpp: symmetry and physicality checks

#include "symstruct/validators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace symstruct {

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "INCONCLUSIVE";
}

Verdict combine(Verdict a, Verdict b)
{
    if (a == Verdict::Fail || b == Verdict::Fail) return Verdict::Fail;
    if (a == Verdict::Inconclusive || b == Verdict::Inconclusive) return Verdict::Inconclusive;
    return Verdict::Pass;
}

AsymmetryReport asymmetry_integral_check(const std::vector<std::vector<double>>& a_alpha, const TimeGrid& grid,
                                         const std::vector<bool>& singular, double tol)
{
    if (!singular.empty() && singular.size() != grid.size()) {
        throw InvalidArgument("asymmetry_integral_check: singular flags do not match the grid");
    }
    AsymmetryReport out;
    for (const auto& a : a_alpha) {
        if (a.size() != grid.size()) throw InvalidArgument("asymmetry_integral_check: series length mismatch");
        std::vector<double> integral(a.size(), 0.0);
        Verdict v = Verdict::Pass;
        double worst = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (!singular.empty() && singular[k]) {
                if (v == Verdict::Pass) v = Verdict::Inconclusive;
                integral.resize(k);
                break;
            }
            if (k > 0) integral[k] = integral[k - 1] + 0.5 * (grid[k] - grid[k - 1]) * (a[k] + a[k - 1]);
            if (!std::isfinite(integral[k])) {
                if (v == Verdict::Pass) v = Verdict::Inconclusive;
                integral.resize(k);
                break;
            }
            worst = k == 0 ? integral[k] : std::max(worst, integral[k]);
            if (integral[k] > tol) v = Verdict::Fail;
        }
        out.verdicts.push_back(v);
        out.integrals.push_back(std::move(integral));
        out.worst_margin.push_back(worst);
        out.verdict = combine(out.verdict, v);
    }
    return out;
}

TraceNormReport trace_norm_monotone_check(const std::vector<Superoperator>& maps, const EigenoperatorBasis& basis,
                                          double tol, double block_tol)
{
    TraceNormReport out;
    for (const auto& map : maps) {
        const BlockStructure bs = verify_block_structure(map, basis);
        out.max_block_residual = std::max({out.max_block_residual, bs.f_offdiag, bs.f_pi_coupling});
        std::vector<double> row;
        for (Index a = 0; a < bs.transition_eigenvalues.size(); ++a) {
            const double l = std::abs(bs.transition_eigenvalues(a));
            row.push_back(l);
            out.max_abs_eigenvalue = std::max(out.max_abs_eigenvalue, l);
            if (!(l <= 1.0 + tol)) out.verdict = Verdict::Fail;
        }
        out.abs_eigenvalues.push_back(std::move(row));
    }
    if (out.max_block_residual > block_tol) out.verdict = combine(out.verdict, Verdict::Inconclusive);
    return out;
}

namespace {

Matrix damping_from_blocks(const BlockStructure& bs, const EigenoperatorBasis& basis, bool diagonal_from_invariant)
{
    const Index n = basis.dim();
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i) {
        m(i, i) = diagonal_from_invariant ? bs.invariant_block(i, i) : cplx(0.0, 0.0);
        for (Index j = 0; j < n; ++j) {
            if (i != j) m(i, j) = bs.transition_eigenvalues(basis.transition_index(i, j));
        }
    }
    return m;
}

} // namespace

DampingReport damping_matrix_check(const Superoperator& map, const EigenoperatorBasis& basis, double tol)
{
    const BlockStructure bs = verify_block_structure(map, basis);
    DampingReport out;
    out.matrix = damping_from_blocks(bs, basis, true);
    out.hermiticity_residual = ops::hermiticity_residual(out.matrix);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (out.matrix + out.matrix.adjoint()), Eigen::EigenvaluesOnly);
    out.min_eigenvalue = es.eigenvalues().minCoeff();
    out.verdict = out.min_eigenvalue >= -tol ? Verdict::Pass : Verdict::Fail;
    return out;
}

Matrix generator_damping_matrix(const Superoperator& generator, const EigenoperatorBasis& basis)
{
    const BlockStructure bs = verify_block_structure(generator, basis);
    Matrix m = damping_from_blocks(bs, basis, false);
    for (Index i = 0; i < basis.dim(); ++i) m(i, i) = bs.invariant_block(i, i);
    return m;
}

CptpReport cptp_check(const Superoperator& map, double tol)
{
    const Index n = map.dim();
    const Matrix j = ops::choi_matrix(map);
    CptpReport out;
    out.hermiticity_residual = (j - j.adjoint()).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (j + j.adjoint()), Eigen::EigenvaluesOnly);
    out.min_choi_eigenvalue = es.eigenvalues().minCoeff();
    out.trace_residual = (ops::partial_trace_env(j, n, n) - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
    const bool ok = out.min_choi_eigenvalue >= -tol && out.trace_residual <= tol && out.hermiticity_residual <= tol;
    out.verdict = ok ? Verdict::Pass : Verdict::Fail;
    return out;
}

double LorenzCurve::operator()(double at) const
{
    if (at <= x.front()) return y.front();
    if (at >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), at);
    const std::size_t k = static_cast<std::size_t>(it - x.begin());
    const double dx = x[k] - x[k - 1];
    if (dx <= 0.0) return y[k];
    return y[k - 1] + (y[k] - y[k - 1]) * (at - x[k - 1]) / dx;
}

namespace {

void validate_distribution(const std::vector<double>& p, const char* what)
{
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= -1e-12) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + ": negative probability");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-10) throw InvalidArgument(std::string(what) + ": probabilities must sum to 1");
}

} // namespace

LorenzCurve lorenz_curve(const std::vector<double>& p, const std::vector<double>& energies, double beta)
{
    if (p.size() != energies.size() || p.empty()) throw InvalidArgument("lorenz_curve: length mismatch");
    if (!(beta >= 0.0)) throw InvalidArgument("lorenz_curve: beta must be >= 0");
    validate_distribution(p, "lorenz_curve");
    const double e0 = *std::min_element(energies.begin(), energies.end());
    std::vector<double> w(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) w[i] = std::exp(-beta * (energies[i] - e0));
    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] / w[a] > p[b] / w[b]; });
    LorenzCurve c;
    c.x.push_back(0.0);
    c.y.push_back(0.0);
    for (std::size_t i : order) {
        c.x.push_back(c.x.back() + w[i]);
        c.y.push_back(c.y.back() + p[i]);
    }
    return c;
}

ThermomajorizationReport thermomajorization_check(const std::vector<double>& p_init,
                                                  const std::vector<double>& p_final,
                                                  const std::vector<double>& energies, double beta, double tol)
{
    if (p_init.size() != p_final.size()) throw InvalidArgument("thermomajorization_check: length mismatch");
    ThermomajorizationReport out;
    out.initial = lorenz_curve(p_init, energies, beta);
    out.final_curve = lorenz_curve(p_final, energies, beta);
    out.worst_margin = 0.0;
    for (std::size_t k = 0; k < out.final_curve.x.size(); ++k) {
        const double margin = out.initial(out.final_curve.x[k]) - out.final_curve.y[k];
        out.worst_margin = std::min(out.worst_margin, margin);
    }
    out.verdict = out.worst_margin >= -tol ? Verdict::Pass : Verdict::Fail;
    return out;
}

namespace {

std::vector<Matrix> reduced_states(const Matrix& h, const Matrix& rho0, Index n_sys, const TimeGrid& grid)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
    const Matrix& v = es.eigenvectors();
    const Matrix r = v.adjoint() * rho0 * v;
    const Index dim = h.rows();
    std::vector<Matrix> out;
    out.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        Vector ph(dim);
        for (Index i = 0; i < dim; ++i) ph(i) = std::exp(cplx(0.0, -es.eigenvalues()(i) * grid[k]));
        const Matrix rt = ph.asDiagonal() * r * ph.conjugate().asDiagonal();
        out.push_back(ops::partial_trace_env(v * rt * v.adjoint(), n_sys, dim / n_sys));
    }
    return out;
}

} // namespace

DegeneracyReport degeneracy_bound_check(const Matrix& h_deg, const Matrix& h_eps, const DensityOperator& rho_s,
                                        const DensityOperator& rho_env, const std::vector<Matrix>& povm,
                                        const TimeGrid& grid, double slack)
{
    const Index ns = rho_s.dim();
    const Index dim = ns * rho_env.dim();
    if (h_deg.rows() != dim || h_deg.cols() != dim || h_eps.rows() != dim || h_eps.cols() != dim) {
        throw InvalidArgument("degeneracy_bound_check: Hamiltonian dimension mismatch");
    }
    for (const auto& m : povm) {
        if (m.rows() != ns || m.cols() != ns) throw InvalidArgument("degeneracy_bound_check: POVM dimension mismatch");
    }
    DegeneracyReport out;
    out.epsilon = ops::operator_norm(h_deg - h_eps);
    const Matrix rho0 = ops::tensor_product(rho_s.matrix(), rho_env.matrix());
    const auto a = reduced_states(h_deg, rho0, ns, grid);
    const auto b = reduced_states(h_eps, rho0, ns, grid);
    const double eps = out.epsilon;
    out.worst_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double t = grid[k];
        const double bound = eps * std::abs(t) + slack * eps * eps;
        std::vector<double> row;
        for (const auto& m : povm) {
            const double d = std::abs((m * (a[k] - b[k])).trace());
            row.push_back(d);
            out.worst_excess = std::max(out.worst_excess, d - bound);
            if (t > 0.0) out.max_slope = std::max(out.max_slope, d / t);
            if (!(d <= bound)) out.verdict = Verdict::Fail;
        }
        out.differences.push_back(std::move(row));
    }
    return out;
}

} // namespace symstruct
