#pragma once

#include <utility>
#include <vector>

#include "uscqed/types.hpp"

// Operator algebra on truncated oscillator (Fock) and charge bases.
// Conventions: [theta, n] = i with theta the dimensionless flux 2*pi*phi/Phi_0
// and n the Cooper-pair number Q/2e; all energies are frequencies in GHz.

namespace uscqed::ops {

// ------- bases -------

// Harmonic-oscillator basis of the circuit mode 4*e_c*n^2 + (1/2)*e_l*theta^2.
struct OscillatorBasis {
  int n_levels = 0;   // Fock-space truncation
  double e_c = 0.0;   // charging energy, GHz
  double e_l = 0.0;   // inductive energy, GHz

  OscillatorBasis(int levels, double ec, double el);

  double omega() const;      // sqrt(8*e_c*e_l)
  double theta_zpf() const;  // (2*e_c/e_l)^(1/4)
  double n_zpf() const;      // (e_l/(32*e_c))^(1/4); theta_zpf*n_zpf = 1/2
};

// Symmetric charge basis |-n_cut> ... |+n_cut| for compact-phase circuits.
struct ChargeBasis {
  int n_cut = 0;    // kept charge states: dimension 2*n_cut + 1
  double ng = 0.0;  // offset charge in units of 2e, |ng| <= 1

  ChargeBasis(int cut, double offset);

  int dim() const { return 2 * n_cut + 1; }
};

// ------- elementary operators -------

// Annihilation/creation pair on n_levels Fock states: a|k> = sqrt(k)|k-1>.
std::pair<Matrix, Matrix> fock_ladder(int n_levels);

// Number operator diag(0, 1, ..., n_levels-1).
Matrix fock_number(int n_levels);

// Fock-space parity diag((-1)^k) = exp(i*pi*a^dag*a).
Matrix fock_parity(int n_levels);

// Mode quadratures theta = theta_zpf*(a + a^dag), n = i*n_zpf*(a^dag - a).
struct Quadratures {
  Matrix theta;
  Matrix n;
};
Quadratures quadratures(const OscillatorBasis& basis);

// Charge-basis operators: n_op = diag(-n_cut..n_cut) and cos_theta with 1/2 on
// the first off-diagonals (theta is compact, e^{±i theta} hop by one charge).
struct ChargeOperators {
  Matrix n_op;
  Matrix cos_theta;
};
ChargeOperators charge_ops(const ChargeBasis& basis);

// ------- composition -------

// Resulting dimension cap for tensor products and dense materialization.
// Overridable through the USC_MAX_DIM environment variable (read once).
long max_tensor_dim();

// Kronecker product, left factor slow: index = i_left*dim_right + j_right.
Matrix tensor(const Matrix& a, const Matrix& b);

// cos(theta_hat - offset) through the spectral decomposition of theta_hat.
// Input must be Hermitian to the HermitianOperator tolerance.
Matrix operator_cosine(const Matrix& theta, double offset);

// ------- structured two-factor operators -------

// Sum of Kronecker terms left ⊗ right on a dim_left * dim_right space.
// Keeps the factors unmaterialized so large products can be applied as
// matrix-vector products (out = R*V*L^T per term on the reshaped state).
class ProductOperator {
 public:
  struct Term {
    Matrix left;   // dim_left x dim_left
    Matrix right;  // dim_right x dim_right
  };

  ProductOperator(Eigen::Index dim_left, Eigen::Index dim_right);

  void add(Matrix left, Matrix right);
  void add_left(Matrix left);    // left ⊗ identity
  void add_right(Matrix right);  // identity ⊗ right

  Eigen::Index dim_left() const { return dl_; }
  Eigen::Index dim_right() const { return dr_; }
  Eigen::Index dim() const { return dl_ * dr_; }
  const std::vector<Term>& terms() const { return terms_; }

  // True when every stored factor has negligible imaginary part.
  bool is_real(double tol = 1e-14) const;

  // Upper bound on the max-norm of the assembled matrix (sum over terms).
  double max_norm_bound() const;

  // Dense materialization; guarded by max_tensor_dim().
  Matrix dense() const;

  // out = H*v applied term by term on the reshaped state (two GEMMs per term).
  void apply(const Vector& v, Vector& out) const;

 private:
  Eigen::Index dl_ = 0, dr_ = 0;
  std::vector<Term> terms_;
};

}  // namespace uscqed::ops
