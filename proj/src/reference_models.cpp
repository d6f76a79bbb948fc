// reference_models.cpp: closed-form Jaynes-Cummings and spin-star oracles

#include "symstruct/reference_models.hpp"

#include <cmath>
#include <string>

namespace symstruct {

namespace {

constexpr double kSingularTol = 1e-10;

// Flags |f| < tol and sign changes between neighbouring samples (both ends of the interval), and
// tangential zeros: an interior extremum of the cubic Hermite interpolant of (f, df) that reaches zero.
void flag_zeros(const TimeGrid& grid, const std::vector<double>& f, const std::vector<double>& df,
                std::vector<bool>& flags)
{
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (std::abs(f[k]) < kSingularTol) flags[k] = true;
        if (k + 1 >= f.size()) continue;
        bool hit = f[k] * f[k + 1] < 0.0;
        const double h = grid[k + 1] - grid[k];
        const double f0 = f[k], f1 = f[k + 1], m0 = h * df[k], m1 = h * df[k + 1];
        const double a = 6.0 * f0 + 3.0 * m0 - 6.0 * f1 + 3.0 * m1;
        const double b = -6.0 * f0 - 4.0 * m0 + 6.0 * f1 - 2.0 * m1;
        const double c = m0;
        std::vector<double> roots;
        if (std::abs(a) > 1e-300) {
            const double disc = b * b - 4.0 * a * c;
            if (disc >= 0.0) {
                const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
                roots.push_back(q / a);
                if (q != 0.0) roots.push_back(c / q);
            }
        } else if (std::abs(b) > 1e-300) {
            roots.push_back(-c / b);
        }
        for (double s : roots) {
            if (!(s > 0.0 && s < 1.0)) continue;
            const double s2 = s * s, s3 = s2 * s;
            const double p = (2.0 * s3 - 3.0 * s2 + 1.0) * f0 + (s3 - 2.0 * s2 + s) * m0 +
                             (-2.0 * s3 + 3.0 * s2) * f1 + (s3 - s2) * m1;
            if (std::abs(p) < kSingularTol || p * f0 < 0.0) hit = true;
        }
        if (hit) {
            flags[k] = true;
            flags[k + 1] = true;
        }
    }
}

Matrix kron_list(const std::vector<Matrix>& factors)
{
    Matrix out = factors.front();
    for (std::size_t k = 1; k < factors.size(); ++k) out = ops::tensor_product(out, factors[k]);
    return out;
}

// sum_k sigma^(k) on K spins.
Matrix collective(int K, const Matrix& single)
{
    const Index dim = Index{1} << K;
    Matrix out = Matrix::Zero(dim, dim);
    for (int k = 0; k < K; ++k) {
        std::vector<Matrix> f(static_cast<std::size_t>(K), ops::identity(2));
        f[static_cast<std::size_t>(k)] = single;
        out += kron_list(f);
    }
    return out;
}

double binomial(int n, int k)
{
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    unsigned __int128 c = 1;
    for (int i = 1; i <= k; ++i) c = c * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    return static_cast<double>(c);
}

} // namespace

Superoperator phase_covariant_qubit_map(double eta_par, double eta_perp, double r, cplx phase)
{
    // Column-stacked vec order: (ee, ge, eg, gg).
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = 0.5 * (1.0 + eta_par + r);
    m(0, 3) = 0.5 * (1.0 - eta_par + r);
    m(3, 0) = 0.5 * (1.0 - eta_par - r);
    m(3, 3) = 0.5 * (1.0 + eta_par - r);
    m(2, 2) = eta_perp * phase;           // <e|X|g>
    m(1, 1) = eta_perp * std::conj(phase);  // <g|X|e>
    return Superoperator(2, m);
}

void JCConfig::validate() const
{
    if (n_trunc < 1) throw InvalidArgument("JCConfig: n_trunc must be >= 1");
    if (static_cast<int>(env_populations.size()) != n_trunc + 1) {
        throw InvalidArgument("JCConfig: env_populations must have n_trunc + 1 entries");
    }
    double sum = 0.0;
    for (double p : env_populations) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("JCConfig: populations must be >= 0");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgument("JCConfig: populations must sum to 1");
    if (!std::isfinite(g) || !std::isfinite(omega)) throw InvalidArgument("JCConfig: non-finite parameter");
}

JCRates jc_bloch_functions(const JCConfig& cfg, const TimeGrid& grid)
{
    cfg.validate();
    JCRates out;
    out.grid = grid;
    const std::size_t n = grid.size();
    for (auto* v : {&out.eta_par, &out.eta_perp, &out.r, &out.deta_par, &out.deta_perp, &out.dr}) v->assign(n, 0.0);
    out.singular.assign(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = grid[k];
        double ep = 0.0, eo = 0.0, r = 0.0, dep = 0.0, deo = 0.0, dr = 0.0;
        for (std::size_t f = 0; f < cfg.env_populations.size(); ++f) {
            const double p = cfg.env_populations[f];
            if (p == 0.0) continue;
            const double s0 = cfg.g * std::sqrt(static_cast<double>(f));
            const double s1 = cfg.g * std::sqrt(static_cast<double>(f + 1));
            const double w0 = std::cos(s0 * t), w1 = std::cos(s1 * t);
            const double dw0 = -s0 * std::sin(s0 * t), dw1 = -s1 * std::sin(s1 * t);
            ep += p * (w0 * w0 + w1 * w1);
            r += p * (w1 * w1 - w0 * w0);
            eo += p * w0 * w1;
            dep += p * 2.0 * (w0 * dw0 + w1 * dw1);
            dr += p * 2.0 * (w1 * dw1 - w0 * dw0);
            deo += p * (dw0 * w1 + w0 * dw1);
        }
        out.eta_par[k] = ep - 1.0;
        out.eta_perp[k] = eo;
        out.r[k] = r;
        out.deta_par[k] = dep;
        out.deta_perp[k] = deo;
        out.dr[k] = dr;
    }
    return out;
}

JCRates jc_rates(const JCConfig& cfg, const TimeGrid& grid)
{
    JCRates out = jc_bloch_functions(cfg, grid);
    const std::size_t n = grid.size();
    out.gamma_plus.assign(n, 0.0);
    out.gamma_minus.assign(n, 0.0);
    out.gamma_z.assign(n, 0.0);
    flag_zeros(grid, out.eta_par, out.deta_par, out.singular);
    flag_zeros(grid, out.eta_perp, out.deta_perp, out.singular);
    for (std::size_t k = 0; k < n; ++k) {
        const double ep = out.eta_par[k];
        const double eo = out.eta_perp[k];
        if (std::abs(ep) < kSingularTol || std::abs(eo) < kSingularTol) continue;
        const double log_dep = out.deta_par[k] / ep;
        out.gamma_plus[k] = 0.5 * (out.dr[k] - (1.0 + out.r[k]) * log_dep);
        out.gamma_minus[k] = 0.5 * (-out.dr[k] - (1.0 - out.r[k]) * log_dep);
        out.gamma_z[k] = 0.25 * (log_dep - 2.0 * out.deta_perp[k] / eo);
    }
    return out;
}

Superoperator jc_exact_map(const JCConfig& cfg, double t, Picture picture)
{
    const JCRates f = jc_bloch_functions(cfg, TimeGrid({t}));
    const cplx phase = picture == Picture::Schroedinger ? std::exp(cplx(0.0, -cfg.omega * t)) : cplx(1.0, 0.0);
    return phase_covariant_qubit_map(f.eta_par[0], f.eta_perp[0], f.r[0], phase);
}

JointSystem jc_joint_hamiltonian(const JCConfig& cfg)
{
    cfg.validate();
    if (cfg.env_populations.back() > 1e-10) {
        throw InvalidArgument("jc_joint_hamiltonian: insufficient truncation, Fock level " +
                              std::to_string(cfg.n_trunc) + " is populated");
    }
    const Index levels = cfg.n_trunc + 1;
    const Matrix b = ops::annihilation(levels);
    const Matrix hs = 0.5 * cfg.omega * ops::pauli_z();
    const Matrix he = cfg.omega * (b.adjoint() * b);
    const Matrix hse = cfg.g * (ops::tensor_product(ops::sigma_plus(), b) +
                                ops::tensor_product(ops::sigma_minus(), b.adjoint()));
    Matrix rho = Matrix::Zero(levels, levels);
    for (Index k = 0; k < levels; ++k) rho(k, k) = cfg.env_populations[static_cast<std::size_t>(k)];
    return JointSystem(hs, he, hse, DensityOperator(rho));
}

void SpinStarConfig::validate(int max_k) const
{
    if (K < 1) throw InvalidArgument("SpinStarConfig: K must be >= 1");
    if (K > max_k) throw InvalidArgument("SpinStarConfig: K = " + std::to_string(K) + " exceeds " + std::to_string(max_k));
    if (!std::isfinite(g) || !std::isfinite(omega)) throw InvalidArgument("SpinStarConfig: non-finite parameter");
}

double spinstar_degeneracy(int K, double j)
{
    const int k = static_cast<int>(std::lround(0.5 * K - j));
    return binomial(K, k) - binomial(K, k - 1);
}

double spinstar_h(double j, double m)
{
    return std::sqrt(std::max(0.0, j * (j + 1.0) - m * (m - 1.0)));
}

std::vector<SpinStarTerm> spinstar_terms(int K)
{
    if (K < 1 || K > 60) throw InvalidArgument("spinstar_terms: K out of range");
    std::vector<SpinStarTerm> out;
    const double norm = std::ldexp(1.0, -K);
    for (double j = 0.5 * K; j >= 0.0; j -= 1.0) {
        const double w = spinstar_degeneracy(K, j) * norm;
        for (double m = -j; m <= j + 0.25; m += 1.0) {
            out.push_back({j, m, w, spinstar_h(j, m), spinstar_h(j, -m)});
        }
    }
    return out;
}

SpinStarKappas spinstar_kappas(const SpinStarConfig& cfg, const TimeGrid& grid)
{
    cfg.validate(30);
    const auto terms = spinstar_terms(cfg.K);
    SpinStarKappas out;
    out.grid = grid;
    const std::size_t n = grid.size();
    for (auto* v : {&out.kappa_z, &out.kappa, &out.dkappa_z, &out.dkappa}) v->assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = grid[k];
        double kz = 0.0, ka = 0.0, dkz = 0.0, dka = 0.0;
        for (const auto& term : terms) {
            const double az = 4.0 * term.h_plus * cfg.g;
            const double ap = 2.0 * term.h_plus * cfg.g;
            const double am = 2.0 * term.h_minus * cfg.g;
            kz += term.weight * std::cos(az * t);
            dkz -= term.weight * az * std::sin(az * t);
            const double cp = std::cos(ap * t), cm = std::cos(am * t);
            ka += term.weight * cp * cm;
            dka -= term.weight * (ap * std::sin(ap * t) * cm + am * cp * std::sin(am * t));
        }
        out.kappa_z[k] = kz;
        out.kappa[k] = ka;
        out.dkappa_z[k] = dkz;
        out.dkappa[k] = dka;
    }
    return out;
}

Superoperator spinstar_exact_map(const SpinStarConfig& cfg, double t, Picture picture)
{
    const SpinStarKappas k = spinstar_kappas(cfg, TimeGrid({t}));
    const cplx phase =
        picture == Picture::Schroedinger ? std::exp(cplx(0.0, -2.0 * cfg.omega * t)) : cplx(1.0, 0.0);
    return phase_covariant_qubit_map(k.kappa_z[0], k.kappa[0], 0.0, phase);
}

Trajectory spinstar_exact_trajectory(const SpinStarConfig& cfg, const Matrix& rho0, const TimeGrid& grid,
                                     Picture picture)
{
    const DensityOperator checked(rho0);
    if (checked.dim() != 2) throw InvalidArgument("spinstar_exact_trajectory: rho0 must be a qubit state");
    const SpinStarKappas k = spinstar_kappas(cfg, grid);
    Trajectory out;
    out.grid = grid;
    out.states.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const cplx phase = picture == Picture::Schroedinger ? std::exp(cplx(0.0, -2.0 * cfg.omega * grid[i]))
                                                            : cplx(1.0, 0.0);
        const Superoperator m = phase_covariant_qubit_map(k.kappa_z[i], k.kappa[i], 0.0, phase);
        out.states.push_back(m.apply(checked.matrix()));
    }
    return out;
}

SpinStarGenerator spinstar_exact_generator(const SpinStarConfig& cfg, const TimeGrid& grid)
{
    const SpinStarKappas k = spinstar_kappas(cfg, grid);
    SpinStarGenerator out;
    out.grid = grid;
    const std::size_t n = grid.size();
    out.eta_z.assign(n, 0.0);
    out.eta.assign(n, 0.0);
    out.singular.assign(n, false);
    flag_zeros(grid, k.kappa_z, k.dkappa_z, out.singular);
    flag_zeros(grid, k.kappa, k.dkappa, out.singular);
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(k.kappa_z[i]) < kSingularTol || std::abs(k.kappa[i]) < kSingularTol) continue;
        out.eta[i] = k.dkappa_z[i] / k.kappa_z[i];
        out.eta_z[i] = 0.5 * out.eta[i] - k.dkappa[i] / k.kappa[i];
    }
    return out;
}

Superoperator spinstar_generator_superop(double eta_z, double eta)
{
    const Matrix sz = ops::pauli_z();
    const Matrix sp = ops::sigma_plus();
    const Matrix sm = ops::sigma_minus();
    return ops::dissipator(sz, sz) * cplx(0.5 * eta_z) -
           (ops::dissipator(sp, sp) + ops::dissipator(sm, sm)) * cplx(0.5 * eta);
}

std::pair<double, double> spinstar_moments(const SpinStarConfig& cfg, int n, int m)
{
    cfg.validate(30);
    if (n < 0 || n > 12 || m < 0 || m > n) throw InvalidArgument("spinstar_moments: need 0 <= m <= n <= 12");
    double q = 0.0, r = 0.0;
    for (const auto& term : spinstar_terms(cfg.K)) {
        const double a = term.h_plus * term.h_plus;
        const double b = term.h_minus * term.h_minus;
        q += term.weight * std::pow(a, n);
        r += term.weight * std::pow(a, n - m) * std::pow(b, m);
    }
    return {q, r};
}

namespace {

JointSystem star_system(const SpinStarConfig& cfg, const Matrix& hs, const Matrix& s_plus)
{
    cfg.validate(12);
    const Index ne = Index{1} << cfg.K;
    const Matrix jp = collective(cfg.K, ops::sigma_plus());
    const Matrix he = cfg.omega * collective(cfg.K, ops::pauli_z());
    const Matrix hse = 2.0 * cfg.g * (ops::tensor_product(s_plus, jp.adjoint()) +
                                      ops::tensor_product(s_plus.adjoint(), jp));
    const Matrix rho = Matrix::Identity(ne, ne) / static_cast<double>(ne);
    return JointSystem(hs, he, hse, DensityOperator(rho));
}

} // namespace

JointSystem spinstar_joint_hamiltonian(const SpinStarConfig& cfg)
{
    return star_system(cfg, cfg.omega * ops::pauli_z(), ops::sigma_plus());
}

JointSystem spinstar_spin1_joint_hamiltonian(const SpinStarConfig& cfg)
{
    Matrix hs = Matrix::Zero(3, 3);
    hs(0, 0) = 2.0 * cfg.omega;
    hs(2, 2) = -2.0 * cfg.omega;
    Matrix sp = Matrix::Zero(3, 3);
    sp(0, 1) = 1.0;
    sp(1, 2) = 1.0;
    return star_system(cfg, hs, sp);
}

} // namespace symstruct
