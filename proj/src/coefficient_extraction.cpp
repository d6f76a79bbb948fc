// coefficient_extraction.cpp: series expansions of the interaction-picture propagator

#include "symstruct/coefficient_extraction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "symstruct/parallel.hpp"

namespace symstruct {

namespace detail {

// Product eigenbasis |a> kron |e> of H_0 = H_S kron I + I kron H_E, grouped into
// degenerate energy shells. Product index p = a * n_env + e.
struct EnergyBlocks {
    Index n_sys{0};
    Index n_env{0};
    Matrix v_s;
    Matrix v_e;
    bool env_diagonal{true};
    RealVector energy;
    std::vector<std::vector<Index>> members;
    std::vector<Matrix> h;                  // H_SE restricted to each shell
    Matrix rho_e;                           // environment state in the H_E eigenbasis
    Matrix h_full;                          // H_SE in the product eigenbasis
    // lookup[block][e] = (position in block, system index) of members with environment index e
    std::vector<std::vector<std::vector<std::pair<Index, Index>>>> lookup;
    double spectral_bound{0.0};
};

} // namespace detail

namespace {

using detail::EnergyBlocks;

struct BlockEntry {
    Index a;
    Index b;
    Matrix m;
};
using BlockOp = std::vector<BlockEntry>;

double frob(const Matrix& m) { return m.size() == 0 ? 0.0 : m.norm(); }

struct BuildResult {
    std::shared_ptr<EnergyBlocks> blocks;
    PostulateReport report;
};

BuildResult build_blocks(const FreeHamiltonian& hs, const Matrix& he, const Matrix& hse, const Matrix& rho_e)
{
    auto eb = std::make_shared<EnergyBlocks>();
    const Index ns = hs.dim();
    const Index ne = he.rows();
    eb->n_sys = ns;
    eb->n_env = ne;
    eb->v_s = hs.eigenvectors();

    RealVector env_energy(ne);
    Matrix off = he;
    off.diagonal().setZero();
    const double he_scale = std::max(1.0, he.cwiseAbs().maxCoeff());
    if (off.cwiseAbs().maxCoeff() <= 1e-15 * he_scale) {
        eb->env_diagonal = true;
        env_energy = he.diagonal().real();
        eb->v_e = Matrix::Identity(ne, ne);
        eb->rho_e = rho_e;
    } else {
        eb->env_diagonal = false;
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (he + he.adjoint()));
        env_energy = es.eigenvalues();
        eb->v_e = es.eigenvectors();
        eb->rho_e = eb->v_e.adjoint() * rho_e * eb->v_e;
    }

    const Index dim = ns * ne;
    eb->energy.resize(dim);
    for (Index a = 0; a < ns; ++a) {
        for (Index e = 0; e < ne; ++e) eb->energy(a * ne + e) = hs.energies()(a) + env_energy(e);
    }

    // H_SE in the product eigenbasis: first I kron V_E, then V_S kron I.
    Matrix hp = hse;
    if (!eb->env_diagonal) {
        for (Index i = 0; i < ns; ++i) {
            for (Index j = 0; j < ns; ++j) {
                hp.block(i * ne, j * ne, ne, ne) = eb->v_e.adjoint() * hse.block(i * ne, j * ne, ne, ne) * eb->v_e;
            }
        }
    }
    Matrix ht = Matrix::Zero(dim, dim);
    for (Index a = 0; a < ns; ++a) {
        for (Index b = 0; b < ns; ++b) {
            for (Index i = 0; i < ns; ++i) {
                const cplx vi = std::conj(eb->v_s(i, a));
                if (vi == cplx(0.0, 0.0)) continue;
                for (Index j = 0; j < ns; ++j) {
                    const cplx w = vi * eb->v_s(j, b);
                    if (w == cplx(0.0, 0.0)) continue;
                    ht.block(a * ne, b * ne, ne, ne) += w * hp.block(i * ne, j * ne, ne, ne);
                }
            }
        }
    }

    BuildResult out;
    double comm = 0.0;
    for (Index q = 0; q < dim; ++q) {
        for (Index p = 0; p < dim; ++p) {
            const double de = eb->energy(p) - eb->energy(q);
            comm += de * de * std::norm(ht(p, q));
        }
    }
    const double h0_scale = std::max(1.0, eb->energy.cwiseAbs().maxCoeff());
    const double hse_norm = frob(hse);
    out.report.energy_conservation = hse_norm > 0.0 ? std::sqrt(comm) / (hse_norm * h0_scale) : 0.0;

    double stat = 0.0;
    for (Index f = 0; f < ne; ++f) {
        for (Index e = 0; e < ne; ++e) stat += std::norm(eb->rho_e(e, f) * (env_energy(f) - env_energy(e)));
    }
    out.report.stationarity = std::sqrt(stat) / std::max(1.0, env_energy.cwiseAbs().maxCoeff());

    Matrix mf(ns, ns);
    for (Index i = 0; i < ns; ++i) {
        for (Index j = 0; j < ns; ++j) {
            mf(i, j) = hse.block(i * ne, j * ne, ne, ne).cwiseProduct(rho_e.transpose()).sum();
        }
    }
    out.report.mean_field = frob(mf);

    // Degenerate shells of H_0.
    std::vector<Index> order(static_cast<std::size_t>(dim));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index l, Index r) { return eb->energy(l) < eb->energy(r); });
    const double width = eb->energy.maxCoeff() - eb->energy.minCoeff();
    const double tol = 1e-9 * std::max(1.0, width);
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (k == 0 || eb->energy(order[k]) - eb->energy(order[k - 1]) > tol) eb->members.emplace_back();
        eb->members.back().push_back(order[k]);
    }
    for (auto& m : eb->members) std::sort(m.begin(), m.end());

    eb->lookup.resize(eb->members.size());
    for (std::size_t blk = 0; blk < eb->members.size(); ++blk) {
        const auto& mem = eb->members[blk];
        const auto sz = static_cast<Index>(mem.size());
        Matrix h(sz, sz);
        for (Index r = 0; r < sz; ++r) {
            for (Index c = 0; c < sz; ++c) h(r, c) = ht(mem[static_cast<std::size_t>(r)], mem[static_cast<std::size_t>(c)]);
        }
        eb->lookup[blk].resize(static_cast<std::size_t>(ne));
        for (Index r = 0; r < sz; ++r) {
            const Index p = mem[static_cast<std::size_t>(r)];
            eb->lookup[blk][static_cast<std::size_t>(p % ne)].emplace_back(r, p / ne);
        }
        h = 0.5 * (h + h.adjoint());
        Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
        eb->spectral_bound = std::max(eb->spectral_bound, 2.0 * es.eigenvalues().cwiseAbs().maxCoeff());
        eb->h.push_back(std::move(h));
    }
    eb->h_full = std::move(ht);
    out.blocks = std::move(eb);
    return out;
}

BlockOp make_input(const EnergyBlocks& eb, const Matrix& x)
{
    const Matrix xt = eb.v_s.adjoint() * x * eb.v_s;
    const Index ne = eb.n_env;
    BlockOp op;
    for (std::size_t a = 0; a < eb.members.size(); ++a) {
        const auto& ra = eb.members[a];
        for (std::size_t b = 0; b < eb.members.size(); ++b) {
            const auto& cb = eb.members[b];
            Matrix m(static_cast<Index>(ra.size()), static_cast<Index>(cb.size()));
            for (std::size_t c = 0; c < cb.size(); ++c) {
                const Index pc = cb[c];
                for (std::size_t r = 0; r < ra.size(); ++r) {
                    const Index pr = ra[r];
                    m(static_cast<Index>(r), static_cast<Index>(c)) = xt(pr / ne, pc / ne) * eb.rho_e(pr % ne, pc % ne);
                }
            }
            if (m.size() > 0 && m.cwiseAbs().maxCoeff() > 0.0) {
                op.push_back({static_cast<Index>(a), static_cast<Index>(b), std::move(m)});
            }
        }
    }
    return op;
}

// scale * [H_SE, op]
BlockOp apply_ad(const EnergyBlocks& eb, const BlockOp& op, double scale)
{
    BlockOp out;
    out.reserve(op.size());
    for (const auto& e : op) {
        const Matrix& ha = eb.h[static_cast<std::size_t>(e.a)];
        const Matrix& hb = eb.h[static_cast<std::size_t>(e.b)];
        Matrix m = ha * e.m;
        m.noalias() -= e.m * hb;
        out.push_back({e.a, e.b, scale * m});
    }
    return out;
}

Matrix trace_env(const EnergyBlocks& eb, const BlockOp& op)
{
    Matrix xt = Matrix::Zero(eb.n_sys, eb.n_sys);
    for (const auto& e : op) {
        const auto& ra = eb.members[static_cast<std::size_t>(e.a)];
        const auto& look = eb.lookup[static_cast<std::size_t>(e.b)];
        for (std::size_t r = 0; r < ra.size(); ++r) {
            const Index p = ra[r];
            for (const auto& [c, j] : look[static_cast<std::size_t>(p % eb.n_env)]) {
                xt(p / eb.n_env, j) += e.m(static_cast<Index>(r), c);
            }
        }
    }
    return eb.v_s * xt * eb.v_s.adjoint();
}

std::vector<Matrix> moments_for(const EnergyBlocks& eb, const Matrix& x, SeriesKind kind, int order, double lambda_b)
{
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(order) + 1);
    BlockOp cur = make_input(eb, x);
    out.push_back(trace_env(eb, cur));
    if (kind == SeriesKind::Maclaurin) {
        for (int n = 1; n <= order; ++n) {
            cur = apply_ad(eb, cur, 1.0);
            out.push_back(trace_env(eb, cur));
        }
        return out;
    }
    // T_0 = Z, T_1 = O Z, T_{m+1} = 2 O T_m - T_{m-1} with O = -ad / lambda_B.
    BlockOp prev;
    for (int m = 1; m <= order; ++m) {
        BlockOp next = apply_ad(eb, cur, (m == 1 ? -1.0 : -2.0) / lambda_b);
        if (m > 1) {
            for (std::size_t k = 0; k < next.size(); ++k) next[k].m -= prev[k].m;
        }
        prev = std::move(cur);
        cur = std::move(next);
        out.push_back(trace_env(eb, cur));
    }
    return out;
}

double effective_bound(const JointSystem& js, double override_bound)
{
    const double lb = override_bound > 0.0 ? override_bound : js.spectral_bound();
    return lb > 0.0 ? lb : 1.0;
}

void check_order(int order)
{
    if (order < 1) throw InvalidArgument("series order must be >= 1");
}

std::string convergence_warning(int order, double lambda_b, double interval_end)
{
    std::ostringstream os;
    os.precision(6);
    os << "CONVERGENCE: Chebychev order " << order << " < r(T) + 10 = " << lambda_b * interval_end + 10.0;
    return os.str();
}

double factorial(int n)
{
    return std::tgamma(static_cast<double>(n) + 1.0);
}

Matrix maclaurin_sum(const std::vector<Matrix>& mom, int order, double t, bool derivative)
{
    Matrix out = derivative ? Matrix::Zero(mom[0].rows(), mom[0].cols()) : mom[0];
    for (int n = 1; n <= order; ++n) {
        const cplx phase = std::pow(cplx(0.0, -1.0), n);
        const double w = derivative ? std::pow(t, n - 1) / factorial(n - 1) : std::pow(t, n) / factorial(n);
        out += phase * w * mom[static_cast<std::size_t>(n)];
    }
    return out;
}

Matrix chebychev_sum(const std::vector<Matrix>& mom, int order, double t, double lambda_b, bool derivative)
{
    const double r = lambda_b * t;
    Matrix out = Matrix::Zero(mom[0].rows(), mom[0].cols());
    for (int m = 0; m <= order; ++m) {
        const cplx c = derivative ? chebychev_w(m, r, lambda_b) : chebychev_a(m, r);
        out += c * mom[static_cast<std::size_t>(m)];
    }
    return out;
}

} // namespace

JointSystem::JointSystem(const Matrix& h_s, const Matrix& h_e, const Matrix& h_se, const DensityOperator& rho_e,
                         double tol)
    : h_s_(h_s), h_e_(h_e), h_se_(h_se), rho_e_(rho_e)
{
    const Index ns = h_s_.dim();
    const Index ne = h_e_.rows();
    if (h_e_.cols() != ne || ne == 0) throw InvalidArgument("JointSystem: H_E must be square");
    if (rho_e_.dim() != ne) throw InvalidArgument("JointSystem: rho_E dimension differs from H_E");
    if (h_se_.rows() != ns * ne || h_se_.cols() != ns * ne) {
        throw InvalidArgument("JointSystem: H_SE dimension differs from N * N_E");
    }
    if (ops::hermiticity_residual(h_e_) > 1e-12 * std::max(1.0, h_e_.cwiseAbs().maxCoeff())) {
        throw InvalidArgument("JointSystem: H_E is not Hermitian");
    }
    if (ops::hermiticity_residual(h_se_) > 1e-12 * std::max(1.0, h_se_.cwiseAbs().maxCoeff())) {
        throw InvalidArgument("JointSystem: H_SE is not Hermitian");
    }
    h_e_ = 0.5 * (h_e_ + h_e_.adjoint());
    h_se_ = 0.5 * (h_se_ + h_se_.adjoint());

    BuildResult built = build_blocks(h_s_, h_e_, h_se_, rho_e_.matrix());
    report_ = built.report;
    auto describe = [](const PostulateReport& r) {
        std::ostringstream os;
        os.precision(3);
        os << "energy-conservation residual " << std::scientific << r.energy_conservation
           << ", stationarity residual " << r.stationarity;
        return os.str();
    };
    if (report_.energy_conservation > tol || report_.stationarity > tol) {
        throw PostulateViolation("JointSystem: postulates violated (" + describe(report_) + ")", report_);
    }

    if (report_.mean_field > 1e-12 * std::max(1.0, frob(h_se_))) {
        Matrix mf(ns, ns);
        for (Index i = 0; i < ns; ++i) {
            for (Index j = 0; j < ns; ++j) {
                mf(i, j) = h_se_.block(i * ne, j * ne, ne, ne).cwiseProduct(rho_e_.matrix().transpose()).sum();
            }
        }
        mf = 0.5 * (mf + mf.adjoint());
        bool absorbed = false;
        try {
            FreeHamiltonian hs2(h_s_.matrix() + mf);
            const Matrix hse2 = h_se_ - ops::tensor_product(mf, ops::identity(ne));
            BuildResult alt = build_blocks(hs2, h_e_, hse2, rho_e_.matrix());
            if (alt.report.energy_conservation <= tol) {
                alt.report.mean_field_absorbed = true;
                alt.report.mean_field = report_.mean_field;
                h_s_ = hs2;
                h_se_ = hse2;
                built = std::move(alt);
                report_ = built.report;
                absorbed = true;
            }
        } catch (const DegenerateSpectrum&) {
        }
        warnings_.push_back(absorbed ? "mean-field part of H_SE absorbed into H_S"
                                     : "H_SE has a non-zero mean field; kept in H_SE since absorbing it "
                                       "would break energy conservation");
    }
    blocks_ = std::move(built.blocks);
}

Matrix JointSystem::joint_hamiltonian() const
{
    const Index ns = system_dim();
    const Index ne = env_dim();
    return ops::tensor_product(h_s_.matrix(), ops::identity(ne)) + ops::tensor_product(ops::identity(ns), h_e_) + h_se_;
}

double JointSystem::spectral_bound() const
{
    return blocks_->spectral_bound;
}

double JointSystem::interaction_picture_residual(double t) const
{
    const auto& eb = *blocks_;
    const Index dim = eb.energy.size();
    double acc = 0.0;
    for (Index q = 0; q < dim; ++q) {
        for (Index p = 0; p < dim; ++p) {
            const cplx phase = std::exp(cplx(0.0, (eb.energy(p) - eb.energy(q)) * t)) - 1.0;
            acc += std::norm(phase * eb.h_full(p, q));
        }
    }
    return std::sqrt(acc);
}

int default_order(SeriesKind kind, double spectral_bound, double interval_end)
{
    if (kind == SeriesKind::Maclaurin) return 10;
    return static_cast<int>(std::ceil(spectral_bound * interval_end)) + 20;
}

namespace {

// J_m(r) for any real r: J_m(-r) = (-1)^m J_m(r).
double bessel_j(int m, double r)
{
    if (m < 0) return (m % 2 == 0 ? 1.0 : -1.0) * bessel_j(-m, r);
    const double j = std::cyl_bessel_j(static_cast<double>(m), std::abs(r));
    return (r < 0.0 && m % 2 == 1) ? -j : j;
}

} // namespace

cplx chebychev_a(int m, double r)
{
    if (m < 0) throw InvalidArgument("chebychev_a: negative order");
    const double j = bessel_j(m, r);
    if (m == 0) return {j, 0.0};
    return 2.0 * std::pow(kI, m) * j;
}

cplx chebychev_w(int m, double r, double lambda_b)
{
    if (m < 0) throw InvalidArgument("chebychev_w: negative order");
    const double dj = 0.5 * (bessel_j(m - 1, r) - bessel_j(m + 1, r));
    const cplx pre = m == 0 ? cplx(1.0, 0.0) : 2.0 * std::pow(kI, m);
    return lambda_b * pre * dj;
}

Matrix maclaurin_generator_action(const JointSystem& js, int order, double t, const Matrix& x)
{
    check_order(order);
    if (x.rows() != js.system_dim() || x.cols() != js.system_dim()) {
        throw InvalidArgument("maclaurin_generator_action: dimension mismatch");
    }
    const auto mom = moments_for(js.blocks(), x, SeriesKind::Maclaurin, order, 1.0);
    return maclaurin_sum(mom, order, t, true);
}

Matrix chebychev_generator_action(const JointSystem& js, int order, double interval_end, double t, const Matrix& x,
                                  std::vector<std::string>* warnings, double spectral_bound)
{
    check_order(order);
    if (!(interval_end > 0.0)) throw InvalidArgument("chebychev_generator_action: T must be > 0");
    if (t < 0.0 || t > interval_end * (1.0 + 1e-12)) {
        throw InvalidArgument("chebychev_generator_action: t outside [0, T]");
    }
    if (x.rows() != js.system_dim() || x.cols() != js.system_dim()) {
        throw InvalidArgument("chebychev_generator_action: dimension mismatch");
    }
    const double lb = effective_bound(js, spectral_bound);
    if (warnings && static_cast<double>(order) < lb * interval_end + 10.0) {
        warnings->push_back(convergence_warning(order, lb, interval_end));
    }
    const auto mom = moments_for(js.blocks(), x, SeriesKind::Chebychev, order, lb);
    return chebychev_sum(mom, order, t, lb, true);
}

SeriesMoments compute_series_moments(const JointSystem& js, const EigenoperatorBasis& basis, SeriesKind kind,
                                     int order, double spectral_bound, int threads)
{
    check_order(order);
    const Index n = basis.dim();
    if (n != js.system_dim()) throw InvalidArgument("compute_series_moments: basis dimension mismatch");
    SeriesMoments out;
    out.kind = kind;
    out.order = order;
    out.spectral_bound = effective_bound(js, spectral_bound);
    out.moments.resize(static_cast<std::size_t>(n * n));

    // F_nm with n > m follow from F_mn: the k-th moment of X^dagger is (-1)^k (moment of X)^dagger.
    std::vector<Index> direct;
    for (Index k = 0; k < n * n; ++k) {
        if (k < basis.num_transitions()) {
            const Transition& t = basis.transitions()[static_cast<std::size_t>(k)];
            if (t.n > t.m) continue;
        }
        direct.push_back(k);
    }
    parallel_for(direct.size(), threads, [&](std::size_t i) {
        const Index k = direct[i];
        out.moments[static_cast<std::size_t>(k)] =
            moments_for(js.blocks(), basis.s_element(k), kind, order, out.spectral_bound);
    });
    for (Index k = 0; k < basis.num_transitions(); ++k) {
        const Transition& t = basis.transitions()[static_cast<std::size_t>(k)];
        if (t.n < t.m) continue;
        const auto& src = out.moments[static_cast<std::size_t>(basis.transition_index(t.m, t.n))];
        auto& dst = out.moments[static_cast<std::size_t>(k)];
        dst.resize(src.size());
        for (std::size_t m = 0; m < src.size(); ++m) {
            dst[m] = (m % 2 == 0 ? 1.0 : -1.0) * src[m].adjoint();
        }
    }
    return out;
}

SeriesExtraction coefficients_from_moments(const SeriesMoments& moments, const EigenoperatorBasis& basis,
                                           const TimeGrid& grid, int order, double interval_end,
                                           GeneratorForm form, double cond_limit)
{
    check_order(order);
    if (order > moments.order) throw InvalidArgument("coefficients_from_moments: order exceeds computed moments");
    const Index n = basis.dim();
    const Index n2 = n * n;
    if (static_cast<Index>(moments.moments.size()) != n2) {
        throw InvalidArgument("coefficients_from_moments: moments do not match the basis");
    }
    SeriesExtraction out;
    const double lb = moments.spectral_bound;
    if (moments.kind == SeriesKind::Chebychev) {
        if (!(interval_end > 0.0)) interval_end = grid.back();
        if (grid.back() > interval_end * (1.0 + 1e-12)) {
            throw InvalidArgument("coefficients_from_moments: grid extends beyond the Chebychev interval");
        }
        if (static_cast<double>(order) < lb * interval_end + 10.0) {
            out.warnings.push_back(convergence_warning(order, lb, interval_end));
        }
    }

    const Matrix& b = basis.s_change_of_basis();
    out.coefficients.grid = grid;
    out.coefficients.values.resize(grid.size());
    out.coefficients.singular.assign(grid.size(), false);
    out.raw.resize(grid.size());
    out.maps.resize(grid.size());
    out.generators.resize(grid.size());
    out.fit_residual.assign(grid.size(), 0.0);
    std::vector<Matrix> derivs(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double t = grid[k];
        Matrix lam(n2, n2);
        Matrix dlam(n2, n2);
        for (Index beta = 0; beta < n2; ++beta) {
            const auto& mom = moments.moments[static_cast<std::size_t>(beta)];
            if (moments.kind == SeriesKind::Maclaurin) {
                lam.col(beta) = ops::vec(maclaurin_sum(mom, order, t, false));
                dlam.col(beta) = ops::vec(maclaurin_sum(mom, order, t, true));
            } else {
                lam.col(beta) = ops::vec(chebychev_sum(mom, order, t, lb, false));
                dlam.col(beta) = ops::vec(chebychev_sum(mom, order, t, lb, true));
            }
        }
        out.maps[k] = Superoperator(n, lam * b.adjoint());
        derivs[k] = dlam * b.adjoint();
    }
    if (form == GeneratorForm::TimeLocal) flag_zero_crossings(out.maps, basis, out.coefficients.singular);

    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Matrix& lam = out.maps[k].matrix();
        const Matrix& dlam = derivs[k];

        Matrix gen;
        if (form == GeneratorForm::MapDerivative) {
            gen = dlam;
        } else {
            Eigen::JacobiSVD<Matrix> svd(lam);
            const auto& sv = svd.singularValues();
            const double smin = sv(sv.size() - 1);
            if (out.coefficients.singular[k] || !(smin > 0.0) || !(sv(0) / smin <= cond_limit)) {
                out.coefficients.singular[k] = true;
                out.coefficients.values[k] = CoefficientSet::zero(n);
                out.raw[k].p = Matrix::Zero(n, n);
                continue;
            }
            Eigen::FullPivLU<Matrix> lu(lam);
            gen = dlam * lu.inverse();
        }
        out.generators[k] = Superoperator(n, gen);
        const CoefficientFit fit = fit_coefficients_from_generator(out.generators[k], basis);
        out.coefficients.values[k] = fit.coefficients;
        out.raw[k] = fit.raw;
        out.fit_residual[k] = fit.residual;
    }
    return out;
}

SeriesExtraction extract_kinetic_coefficients(const JointSystem& js, const SeriesSpec& spec, const TimeGrid& grid,
                                              GeneratorForm form, int threads)
{
    const FreeHamiltonian& hs = js.system_hamiltonian();
    if (bohr_spectrum(hs, default_degeneracy_tolerance(hs)).degenerate) {
        throw DegenerateSpectrum("extract_kinetic_coefficients: Bohr spectrum of H_S is degenerate; lift it first");
    }
    const EigenoperatorBasis basis = build_basis(hs);
    double interval_end = spec.interval_end;
    if (spec.kind == SeriesKind::Chebychev && !(interval_end > 0.0)) interval_end = grid.back();
    const SeriesMoments mom = compute_series_moments(js, basis, spec.kind, spec.order, spec.spectral_bound, threads);
    SeriesExtraction out = coefficients_from_moments(mom, basis, grid, spec.order, interval_end, form);
    out.warnings.insert(out.warnings.begin(), js.warnings().begin(), js.warnings().end());
    return out;
}

KineticCoefficients to_schroedinger_picture(const KineticCoefficients& interaction, const FreeHamiltonian& h_s)
{
    const Index n = h_s.dim();
    const Matrix shift = h_s.matrix() - (h_s.matrix().trace() / static_cast<double>(n)) * Matrix::Identity(n, n);
    KineticCoefficients out = interaction;
    for (std::size_t k = 0; k < out.values.size(); ++k) {
        if (k < out.singular.size() && out.singular[k]) continue;
        out.values[k].hbar += shift;
    }
    return out;
}

} // namespace symstruct
