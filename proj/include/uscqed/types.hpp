#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace uscqed {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr const char* kVersion = "0.1.0";

// ------- errors -------

// Bad matrix/basis dimensions (non-positive, mismatched operands, ...).
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Request exceeds a configured resource limit (tensor guard, truncation caps).
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An argument violates a documented precondition (non-Hermitian input, ...).
struct ContractError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Physically out-of-domain parameter values (x = 0 resonator, off-degeneracy
// two-level reduction, non-positive energies).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// A perturbative expression was evaluated too close to one of its poles.
struct ResonanceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A file could not be read, written, or parsed.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ------- hermitian wrapper -------

// Dense Hermitian matrix. Construction verifies hermiticity to a relative
// max-norm tolerance so downstream eigensolves can assume it.
class HermitianOperator {
 public:
  static constexpr double kHermTol = 1e-12;

  explicit HermitianOperator(Matrix m) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols() || mat_.rows() < 1)
      throw DimensionError("HermitianOperator: matrix must be square and non-empty");
    const double scale = mat_.cwiseAbs().maxCoeff();
    const double dev = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
    if (dev > kHermTol * std::max(scale, 1.0))
      throw ContractError("HermitianOperator: matrix is not Hermitian (max deviation " +
                          std::to_string(dev) + ")");
  }

  Eigen::Index dim() const { return mat_.rows(); }
  const Matrix& matrix() const { return mat_; }

 private:
  Matrix mat_;
};

}  // namespace uscqed
