#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "uscqed/operators.hpp"
#include "uscqed/types.hpp"

// Eigensolves with a fixed phase convention, truncation-convergence control,
// transition extraction and matrix elements between eigenstates.

namespace uscqed::spectral {

// Long-double dense solves resolve eigenvalue differences below the double
// floor eps*||H|| (needed for deep-in-the-degenerate-regime doublets).
enum class Precision { Double, LongDouble };

struct EigensolveOptions {
  Precision precision = Precision::Double;
  Eigen::Index dense_threshold = 4000;  // dimensions above this use Lanczos
  double residual_tol = 1e-8;           // relative to the max-norm of H
  int lanczos_max_iter = 600;
  std::uint64_t lanczos_seed = 0x5eedc0deULL;
  const Matrix* parity = nullptr;  // optional near-degenerate tie-break operator
  // Optional 0/1 diagonal projector commuting with H: restricts the iterative
  // solver to the masked subspace, so clustered sectors can be solved
  // separately. Iterative path only; a dense route refuses it.
  const RealVector* sector_mask = nullptr;
};

struct ConvergeRecord {
  std::vector<int> dims;
  RealVector eigenvalues;
  double drift;  // max |change| vs previous round; inf on the first round
};

struct SpectralResult {
  RealVector eigenvalues;       // ascending, the k lowest
  Matrix eigenvectors;          // dim x k, column i belongs to eigenvalues[i]
  std::vector<int> basis_dims;  // truncation dims behind the matrix
  bool converged = true;        // truncation-controller verdict
  std::vector<ConvergeRecord> history;
  double residual_norm = 0.0;  // max over pairs of ||H v - lambda v||_2
};

// Lowest k eigenpairs. Eigenvector phases: the largest-magnitude component is
// made real positive. Eigenvalues closer than 1e-12 are ordered by the parity
// expectation (descending) when opts.parity is given, else by the sign of the
// first nonzero component.
SpectralResult eigensolve(const HermitianOperator& h, int k, const EigensolveOptions& opts = {});
SpectralResult eigensolve(const ops::ProductOperator& h, int k, const EigensolveOptions& opts = {});
// Real-symmetric input without the complex wrapper; the dense sector blocks
// of large product operators would otherwise double their footprint.
SpectralResult eigensolve(const RealMatrix& h, int k, const EigensolveOptions& opts = {});

struct TruncationPolicy {
  int k = 12;
  double tol = 1e-4;  // GHz; max eigenvalue drift between successive rounds
  std::vector<int> start_dims{60, 60};
  int step = 20;
  std::vector<int> max_dims{200, 200};
  EigensolveOptions solver;
};

using Factory = std::function<ops::ProductOperator(const std::vector<int>&)>;

// Re-solves with growing truncation dims until the k lowest eigenvalues drift
// by less than tol between rounds; result.converged = false when the caps were
// reached first. Every round is recorded in result.history.
SpectralResult converge_truncation(const Factory& factory, const TruncationPolicy& policy);

struct Transition {
  int from = 0, to = 0;
  double value = 0.0;  // E_to - E_from, GHz
};

// E_j - E_i for every i in `from` and every j > i.
std::vector<Transition> transitions(const SpectralResult& result, const std::vector<int>& from);

// <i| op |j> between eigenstates of `result`.
Complex matrix_element(const SpectralResult& result, const Matrix& op, int i, int j);

}  // namespace uscqed::spectral
