// symmetry_basis.cpp: eigenoperator bases, Bohr spectra and block-structure checks

#include "symstruct/symmetry_basis.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace symstruct {

namespace {

double width_tolerance(double width)
{
    return 1e-9 * std::max(1.0, width);
}

void fix_phases(Matrix& vectors)
{
    for (Index k = 0; k < vectors.cols(); ++k) {
        Index idx = 0;
        vectors.col(k).cwiseAbs().maxCoeff(&idx);
        const cplx c = vectors(idx, k);
        vectors.col(k) *= std::conj(c) / std::abs(c);
        vectors(idx, k) = std::abs(vectors(idx, k));
    }
}

// Pairs of distinct transitions whose Bohr frequencies are closer than tol.
double min_bohr_gap(const RealVector& e, std::vector<std::pair<Index, Index>>* colliding,
                    double tol, std::vector<Transition>* entries)
{
    const Index n = e.size();
    std::vector<Transition> list;
    for (Index a = 0; a < n; ++a) {
        for (Index b = 0; b < n; ++b) {
            if (a != b) list.push_back({a, b, e(a) - e(b)});
        }
    }
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < list.size(); ++p) {
        for (std::size_t q = p + 1; q < list.size(); ++q) {
            const double d = std::abs(list[p].omega - list[q].omega);
            gap = std::min(gap, d);
            if (colliding && d < tol) {
                colliding->emplace_back(static_cast<Index>(p), static_cast<Index>(q));
            }
        }
    }
    if (entries) *entries = std::move(list);
    return gap;
}

} // namespace

FreeHamiltonian::FreeHamiltonian(const Matrix& h, double level_tol) : h_(h)
{
    if (h_.rows() != h_.cols() || h_.rows() == 0) {
        throw InvalidArgument("FreeHamiltonian: matrix must be square and non-empty");
    }
    if (!h_.allFinite()) throw InvalidArgument("FreeHamiltonian: non-finite entries");
    const double scale = std::max(1.0, h_.cwiseAbs().maxCoeff());
    if (ops::hermiticity_residual(h_) > 1e-12 * scale) {
        throw InvalidArgument("FreeHamiltonian: matrix is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h_ + h_.adjoint()));
    energies_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
    fix_phases(vectors_);
    const double tol = level_tol < 0.0 ? width_tolerance(spectral_width()) : level_tol;
    for (Index k = 1; k < energies_.size(); ++k) {
        if (energies_(k) - energies_(k - 1) < tol) {
            throw DegenerateSpectrum("FreeHamiltonian: degenerate energy levels");
        }
    }
}

FreeHamiltonian FreeHamiltonian::from_unitary(const Matrix& u, double level_tol)
{
    if (u.rows() != u.cols() || u.rows() == 0) {
        throw InvalidArgument("FreeHamiltonian::from_unitary: matrix must be square");
    }
    const Index n = u.rows();
    if ((u.adjoint() * u - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10) {
        throw InvalidArgument("FreeHamiltonian::from_unitary: matrix is not unitary");
    }
    Eigen::ComplexSchur<Matrix> schur(u);
    const Matrix& q = schur.matrixU();
    RealVector theta(n);
    for (Index k = 0; k < n; ++k) theta(k) = -std::arg(schur.matrixT()(k, k));
    Matrix g = q * theta.cast<cplx>().asDiagonal() * q.adjoint();
    g = 0.5 * (g + g.adjoint());
    return FreeHamiltonian(g, level_tol);
}

double default_degeneracy_tolerance(const FreeHamiltonian& h)
{
    return width_tolerance(h.spectral_width());
}

EigenoperatorBasis::EigenoperatorBasis(const FreeHamiltonian& h)
    : dim_(h.dim()), energies_(h.energies()), vectors_(h.eigenvectors())
{
    const Index n = dim_;
    for (Index a = 0; a < n; ++a) {
        for (Index b = 0; b < n; ++b) {
            if (a == b) continue;
            transitions_.push_back({a, b, energies_(a) - energies_(b)});
            transition_ops_.push_back(vectors_.col(a) * vectors_.col(b).adjoint());
        }
    }
    for (Index j = 0; j < n; ++j) projectors_.push_back(vectors_.col(j) * vectors_.col(j).adjoint());

    gellmann_ = RealMatrix::Zero(n, n);
    for (Index j = 1; j < n; ++j) {
        const double norm = std::sqrt(1.0 / static_cast<double>(j * (j + 1)));
        for (Index l = 0; l < j; ++l) gellmann_(j - 1, l) = norm;
        gellmann_(j - 1, j) = -static_cast<double>(j) * norm;
    }
    gellmann_.row(n - 1).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
    for (Index k = 0; k < n; ++k) {
        Matrix p = Matrix::Zero(n, n);
        for (Index i = 0; i < n; ++i) p += gellmann_(k, i) * projectors_[static_cast<std::size_t>(i)];
        diagonal_ops_.push_back(p);
    }
    diagonal_ops_.back() = Matrix::Identity(n, n) / std::sqrt(static_cast<double>(n));

    s_columns_.resize(n * n, n * n);
    for (Index k = 0; k < n * n; ++k) s_columns_.col(k) = ops::vec(s_element(k));
}

Index EigenoperatorBasis::transition_index(Index n, Index m) const
{
    if (n == m || n < 0 || m < 0 || n >= dim_ || m >= dim_) {
        throw InvalidArgument("transition_index: invalid level pair");
    }
    return n * (dim_ - 1) + (m < n ? m : m - 1);
}

const Matrix& EigenoperatorBasis::s_element(Index k) const
{
    const Index nt = num_transitions();
    if (k < 0 || k >= dim_ * dim_) throw InvalidArgument("s_element: index out of range");
    if (k < nt) return transition_ops_[static_cast<std::size_t>(k)];
    return projectors_[static_cast<std::size_t>(k - nt)];
}

EigenoperatorBasis build_basis(const FreeHamiltonian& h)
{
    return EigenoperatorBasis(h);
}

BohrSpectrum bohr_spectrum(const FreeHamiltonian& h, double tol)
{
    BohrSpectrum out;
    out.min_gap = min_bohr_gap(h.energies(), nullptr, 0.0, &out.entries);
    out.degenerate = out.min_gap < tol;
    return out;
}

LiftedHamiltonian lift_degeneracy(const FreeHamiltonian& h, double epsilon)
{
    if (!(epsilon > 0.0)) throw InvalidArgument("lift_degeneracy: epsilon must be > 0");
    const RealVector original = h.energies();
    RealVector e = original;
    const Index n = e.size();
    int shifts = 0;
    const int max_shifts = static_cast<int>(4 * n * n * n) + 16;
    for (;;) {
        std::vector<std::pair<Index, Index>> colliding;
        std::vector<Transition> entries;
        min_bohr_gap(e, &colliding, 0.5 * epsilon, &entries);
        if (colliding.empty()) break;
        Index top = 0;
        for (const auto& [p, q] : colliding) {
            for (const Transition* t : {&entries[static_cast<std::size_t>(p)], &entries[static_cast<std::size_t>(q)]}) {
                if (e(t->n) > e(top)) top = t->n;
                if (e(t->m) > e(top)) top = t->m;
            }
        }
        e(top) += epsilon;
        if (++shifts > max_shifts) throw NumericalFailure("lift_degeneracy: no separation reached");
    }
    for (Index k = 1; k < n; ++k) {
        if (!(e(k) > e(k - 1))) {
            throw InvalidArgument("lift_degeneracy: epsilon so large it reorders eigenvalues");
        }
    }
    const Matrix& v = h.eigenvectors();
    Matrix lifted = v * e.cast<cplx>().asDiagonal() * v.adjoint();
    lifted = 0.5 * (lifted + lifted.adjoint());
    return {FreeHamiltonian(lifted), (e - original).cwiseAbs().maxCoeff(), shifts};
}

std::vector<AsymmetryMode> mode_decompose(const Matrix& x, const EigenoperatorBasis& basis, double tol)
{
    const Index n = basis.dim();
    if (x.rows() != n || x.cols() != n) throw InvalidArgument("mode_decompose: dimension mismatch");
    const RealVector& e = basis.energies();
    if (tol < 0.0) tol = width_tolerance(e(n - 1) - e(0));

    std::vector<AsymmetryMode> modes;
    auto slot = [&](double omega) -> Matrix& {
        for (auto& m : modes) {
            if (std::abs(m.omega - omega) <= tol) return m.component;
        }
        modes.push_back({omega, Matrix::Zero(n, n)});
        return modes.back().component;
    };
    Matrix& diag = slot(0.0);
    for (Index j = 0; j < n; ++j) diag += ops::hs_inner(basis.projector(j), x) * basis.projector(j);
    for (Index a = 0; a < basis.num_transitions(); ++a) {
        const Matrix& f = basis.transition_op(a);
        slot(basis.transitions()[static_cast<std::size_t>(a)].omega) += ops::hs_inner(f, x) * f;
    }
    const double cutoff = 1e-14 * std::max(1.0, x.cwiseAbs().maxCoeff());
    std::erase_if(modes, [&](const AsymmetryMode& m) { return m.component.cwiseAbs().maxCoeff() <= cutoff; });
    std::stable_sort(modes.begin(), modes.end(),
                     [](const AsymmetryMode& l, const AsymmetryMode& r) { return l.omega < r.omega; });
    return modes;
}

BlockStructure verify_block_structure(const Superoperator& s, const EigenoperatorBasis& basis)
{
    const Index n = basis.dim();
    if (s.dim() != n) throw InvalidArgument("verify_block_structure: dimension mismatch");
    const Index nt = basis.num_transitions();
    const Matrix& b = basis.s_change_of_basis();

    BlockStructure out;
    out.s_matrix = b.adjoint() * s.matrix() * b;
    const Matrix& m = out.s_matrix;
    for (Index r = 0; r < n * n; ++r) {
        for (Index c = 0; c < n * n; ++c) {
            const bool r_f = r < nt;
            const bool c_f = c < nt;
            const double mag = std::abs(m(r, c));
            if (r_f && c_f && r != c) out.f_offdiag = std::max(out.f_offdiag, mag);
            if (r_f != c_f) out.f_pi_coupling = std::max(out.f_pi_coupling, mag);
        }
    }
    out.invariant_block = m.bottomRightCorner(n, n);
    out.transition_eigenvalues = m.diagonal().head(nt);
    return out;
}

} // namespace symstruct
