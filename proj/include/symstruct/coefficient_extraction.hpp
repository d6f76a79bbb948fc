// coefficient_extraction.hpp: kinetic coefficients from the joint Hamiltonian by
// Maclaurin and Chebyshev expansions of the interaction-picture propagator

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "symstruct/generator_core.hpp"

namespace symstruct {

struct PostulateReport {
    double energy_conservation{0.0};  // ||[H_S + H_E, H_SE]||_F / (||H_SE||_F max(1, ||H_0||))
    double stationarity{0.0};         // ||[rho_E, H_E]||_F / max(1, ||H_E||)
    double mean_field{0.0};           // ||tr_E(H_SE (I kron rho_E))||_F
    bool mean_field_absorbed{false};
};

class PostulateViolation : public SymmetryViolation {
public:
    PostulateViolation(const std::string& what, PostulateReport report)
        : SymmetryViolation(what), report_(report) {}
    const PostulateReport& report() const { return report_; }

private:
    PostulateReport report_;
};

namespace detail {
struct EnergyBlocks;
}

// System + environment with an energy-conserving interaction and a stationary environment state.
// The interaction is stored block-diagonally in the product eigenbasis of H_S kron I + I kron H_E.
class JointSystem {
public:
    JointSystem(const Matrix& h_s, const Matrix& h_e, const Matrix& h_se, const DensityOperator& rho_e,
                double tol = 1e-10);

    const FreeHamiltonian& system_hamiltonian() const { return h_s_; }
    const Matrix& environment_hamiltonian() const { return h_e_; }
    const Matrix& interaction() const { return h_se_; }
    const DensityOperator& environment_state() const { return rho_e_; }
    Index system_dim() const { return h_s_.dim(); }
    Index env_dim() const { return h_e_.rows(); }

    Matrix joint_hamiltonian() const;
    const PostulateReport& report() const { return report_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    // 2 max|eig(H_SE)|: bound on the spectrum of the commutator superoperator [H_SE, .].
    double spectral_bound() const;
    // ||exp(i H_0 t) H_SE exp(-i H_0 t) - H_SE||_F.
    double interaction_picture_residual(double t) const;

    const detail::EnergyBlocks& blocks() const { return *blocks_; }

private:
    FreeHamiltonian h_s_;
    Matrix h_e_;
    Matrix h_se_;
    DensityOperator rho_e_;
    PostulateReport report_;
    std::vector<std::string> warnings_;
    std::shared_ptr<const detail::EnergyBlocks> blocks_;
};

enum class SeriesKind { Maclaurin, Chebychev };

struct SeriesSpec {
    SeriesKind kind{SeriesKind::Maclaurin};
    int order{10};
    double interval_end{0.0};     // T, Chebychev only
    double spectral_bound{0.0};   // lambda_B override; 0 selects JointSystem::spectral_bound()
};

// Default orders: Maclaurin 10, Chebychev ceil(lambda_B T) + 20.
int default_order(SeriesKind kind, double spectral_bound, double interval_end);

// Chebychev expansion coefficients of exp(i r x): a_m(r) = (2 i^m - delta_m0) J_m(r),
// and w_m = d a_m / dt for r = lambda_B t.
cplx chebychev_a(int m, double r);
cplx chebychev_w(int m, double r, double lambda_b);

// Truncated-series action on X: sum_{n=1..M} (-i)^n t^{n-1}/(n-1)! tr_E(ad_{H_SE}^n (X kron rho_E)).
Matrix maclaurin_generator_action(const JointSystem& js, int order, double t, const Matrix& x);

// Same quantity from the Chebychev expansion of exp(-i ad_{H_SE} t) on [0, T].
// Appends a CONVERGENCE warning when order < lambda_B T + 10.
Matrix chebychev_generator_action(const JointSystem& js, int order, double interval_end, double t,
                                  const Matrix& x, std::vector<std::string>* warnings = nullptr,
                                  double spectral_bound = 0.0);

// Time-independent series data for every S-basis element:
//   Maclaurin: moments[beta][n] = tr_E(ad^n (S_beta kron rho_E)), n = 0..order;
//   Chebychev: moments[beta][m] = tr_E(T_m(-ad / lambda_B)(S_beta kron rho_E)), m = 0..order.
struct SeriesMoments {
    SeriesKind kind{SeriesKind::Maclaurin};
    int order{0};
    double spectral_bound{0.0};
    std::vector<std::vector<Matrix>> moments;
};

SeriesMoments compute_series_moments(const JointSystem& js, const EigenoperatorBasis& basis, SeriesKind kind,
                                     int order, double spectral_bound = 0.0, int threads = 1);

// How the series is turned into a generator at each time.
//   TimeLocal:     L(t) = dLambda_M/dt Lambda_M(t)^{-1}, Lambda_M the same-order truncated map;
//   MapDerivative: L(t) = dLambda_M/dt, the series action on the initial operator.
enum class GeneratorForm { TimeLocal, MapDerivative };

struct SeriesExtraction {
    KineticCoefficients coefficients;       // interaction picture
    std::vector<SourceDrainRaw> raw;
    std::vector<Superoperator> maps;        // truncated Lambda_M(t)
    std::vector<Superoperator> generators;  // empty where singular
    std::vector<double> fit_residual;
    std::vector<std::string> warnings;
};

SeriesExtraction coefficients_from_moments(const SeriesMoments& moments, const EigenoperatorBasis& basis,
                                           const TimeGrid& grid, int order, double interval_end = 0.0,
                                           GeneratorForm form = GeneratorForm::TimeLocal,
                                           double cond_limit = 1e12);

SeriesExtraction extract_kinetic_coefficients(const JointSystem& js, const SeriesSpec& spec, const TimeGrid& grid,
                                              GeneratorForm form = GeneratorForm::TimeLocal, int threads = 1);

// Adds the traceless part of H_S to hbar: interaction-picture coefficients to Schroedinger picture.
KineticCoefficients to_schroedinger_picture(const KineticCoefficients& interaction, const FreeHamiltonian& h_s);

} // namespace symstruct
