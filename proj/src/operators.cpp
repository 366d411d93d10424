#include "uscqed/operators.hpp"

#include <cmath>
#include <cstdlib>

namespace uscqed::ops {

// ------- bases -------

OscillatorBasis::OscillatorBasis(int levels, double ec, double el)
    : n_levels(levels), e_c(ec), e_l(el) {
  if (levels < 1) throw DimensionError("OscillatorBasis: n_levels must be >= 1");
  if (!(ec > 0.0) || !(el > 0.0))
    throw DomainError("OscillatorBasis: e_c and e_l must be positive");
}

double OscillatorBasis::omega() const { return std::sqrt(8.0 * e_c * e_l); }
double OscillatorBasis::theta_zpf() const { return std::pow(2.0 * e_c / e_l, 0.25); }
double OscillatorBasis::n_zpf() const { return std::pow(e_l / (32.0 * e_c), 0.25); }

ChargeBasis::ChargeBasis(int cut, double offset) : n_cut(cut), ng(offset) {
  if (cut < 1) throw DimensionError("ChargeBasis: n_cut must be >= 1");
  if (std::abs(offset) > 1.0)
    throw DomainError("ChargeBasis: |ng| must be <= 1 (offset charge in units of 2e)");
}

// ------- elementary operators -------

std::pair<Matrix, Matrix> fock_ladder(int n_levels) {
  if (n_levels < 1) throw DimensionError("fock_ladder: n_levels must be >= 1");
  Matrix a = Matrix::Zero(n_levels, n_levels);
  for (int k = 1; k < n_levels; ++k) a(k - 1, k) = std::sqrt(double(k));
  return {a, a.adjoint()};
}

Matrix fock_number(int n_levels) {
  if (n_levels < 1) throw DimensionError("fock_number: n_levels must be >= 1");
  Matrix n = Matrix::Zero(n_levels, n_levels);
  for (int k = 0; k < n_levels; ++k) n(k, k) = double(k);
  return n;
}

Matrix fock_parity(int n_levels) {
  if (n_levels < 1) throw DimensionError("fock_parity: n_levels must be >= 1");
  Matrix p = Matrix::Zero(n_levels, n_levels);
  for (int k = 0; k < n_levels; ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return p;
}

Quadratures quadratures(const OscillatorBasis& basis) {
  auto [a, adag] = fock_ladder(basis.n_levels);
  Quadratures q;
  q.theta = basis.theta_zpf() * (a + adag);
  q.n = Complex(0.0, 1.0) * basis.n_zpf() * (adag - a);
  return q;
}

ChargeOperators charge_ops(const ChargeBasis& basis) {
  const int d = basis.dim();
  ChargeOperators ops;
  ops.n_op = Matrix::Zero(d, d);
  ops.cos_theta = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) ops.n_op(i, i) = double(i - basis.n_cut);
  for (int i = 0; i + 1 < d; ++i) {
    ops.cos_theta(i, i + 1) = 0.5;
    ops.cos_theta(i + 1, i) = 0.5;
  }
  return ops;
}

// ------- composition -------

long max_tensor_dim() {
  static const long cap = [] {
    if (const char* env = std::getenv("USC_MAX_DIM")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end != env && v > 0) return v;
    }
    return 200000L;
  }();
  return cap;
}

Matrix tensor(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols())
    throw DimensionError("tensor: factors must be square");
  const long dim = long(a.rows()) * long(b.rows());
  if (dim > max_tensor_dim())
    throw ResourceError("tensor: product dimension " + std::to_string(dim) +
                        " exceeds the guard " + std::to_string(max_tensor_dim()) +
                        " (override with USC_MAX_DIM)");
  Matrix out(dim, dim);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix operator_cosine(const Matrix& theta, double offset) {
  const HermitianOperator checked(theta);  // validates squareness + hermiticity
  Eigen::SelfAdjointEigenSolver<Matrix> es(checked.matrix());
  if (es.info() != Eigen::Success)
    throw std::runtime_error("operator_cosine: eigendecomposition failed");
  RealVector c = es.eigenvalues();
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = std::cos(c(i) - offset);
  return es.eigenvectors() * c.asDiagonal() * es.eigenvectors().adjoint();
}

// ------- structured two-factor operators -------

ProductOperator::ProductOperator(Eigen::Index dim_left, Eigen::Index dim_right)
    : dl_(dim_left), dr_(dim_right) {
  if (dl_ < 1 || dr_ < 1)
    throw DimensionError("ProductOperator: factor dimensions must be >= 1");
}

void ProductOperator::add(Matrix left, Matrix right) {
  if (left.rows() != dl_ || left.cols() != dl_ || right.rows() != dr_ || right.cols() != dr_)
    throw DimensionError("ProductOperator::add: factor shape mismatch");
  terms_.push_back({std::move(left), std::move(right)});
}

void ProductOperator::add_left(Matrix left) { add(std::move(left), Matrix::Identity(dr_, dr_)); }
void ProductOperator::add_right(Matrix right) { add(Matrix::Identity(dl_, dl_), std::move(right)); }

bool ProductOperator::is_real(double tol) const {
  for (const auto& t : terms_)
    if (t.left.imag().cwiseAbs().maxCoeff() > tol || t.right.imag().cwiseAbs().maxCoeff() > tol)
      return false;
  return true;
}

double ProductOperator::max_norm_bound() const {
  double bound = 0.0;
  for (const auto& t : terms_)
    bound += t.left.cwiseAbs().maxCoeff() * t.right.cwiseAbs().maxCoeff();
  return bound;
}

Matrix ProductOperator::dense() const {
  if (dim() > max_tensor_dim())
    throw ResourceError("ProductOperator::dense: dimension " + std::to_string(dim()) +
                        " exceeds the guard (override with USC_MAX_DIM)");
  Matrix out = Matrix::Zero(dim(), dim());
  for (const auto& t : terms_) out += tensor(t.left, t.right);
  return out;
}

// (L ⊗ R) v with v reshaped column-major to V(dim_right, dim_left): R*V*L^T.
void ProductOperator::apply(const Vector& v, Vector& out) const {
  if (v.size() != dim()) throw DimensionError("ProductOperator::apply: vector size mismatch");
  out.setZero(dim());
  using MapT = Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>>;
  using MapOut = Eigen::Map<Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>>;
  MapT vm(v.data(), dr_, dl_);
  MapOut om(out.data(), dr_, dl_);
  for (const auto& t : terms_) om.noalias() += t.right * vm * t.left.transpose();
}

}  // namespace uscqed::ops
