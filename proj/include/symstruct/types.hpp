// types.hpp: shared aliases and error types

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace symstruct {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr cplx kI{0.0, 1.0};

// Invalid sizes, non-Hermitian input and similar caller errors.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Degenerate energy levels or Bohr frequencies where a non-degenerate spectrum is required.
class DegenerateSpectrum : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

// A superoperator or joint Hamiltonian that breaks the time-translation symmetry.
class SymmetryViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Step-size, conditioning or convergence failures of an otherwise valid computation.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace symstruct
