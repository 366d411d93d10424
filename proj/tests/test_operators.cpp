// Operator-algebra checks: basis scales, canonical commutators on the
// truncated interior, tensor layout, the spectral cosine against its own
// Taylor series, and the structured product-operator apply path.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "uscqed/operators.hpp"

using namespace uscqed;
using doctest::Approx;

TEST_CASE("oscillator basis scales") {
  const ops::OscillatorBasis b(10, 2.5, 0.5);
  CHECK(b.omega() == Approx(std::sqrt(8.0 * 2.5 * 0.5)).epsilon(1e-14));
  CHECK(b.theta_zpf() == Approx(std::pow(2.0 * 2.5 / 0.5, 0.25)).epsilon(1e-14));
  // theta_zpf * n_zpf = 1/2 for every (e_c, e_l)
  CHECK(b.theta_zpf() * b.n_zpf() == Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(ops::OscillatorBasis(3, -1.0, 1.0), DomainError);
  CHECK_THROWS_AS(ops::OscillatorBasis(0, 1.0, 1.0), DimensionError);
}

TEST_CASE("ladder, number and parity matrices") {
  auto [a, ad] = ops::fock_ladder(8);
  CHECK(a(0, 1).real() == Approx(1.0));
  CHECK(a(6, 7).real() == Approx(std::sqrt(7.0)).epsilon(1e-14));
  // [a, a'] = 1 on the interior; the corner carries the truncation artifact
  const Matrix comm = a * ad - ad * a;
  for (int k = 0; k + 1 < 8; ++k) CHECK(comm(k, k).real() == Approx(1.0).epsilon(1e-14));
  CHECK(comm(7, 7).real() == Approx(-7.0).epsilon(1e-14));
  CHECK((ad * a - ops::fock_number(8)).cwiseAbs().maxCoeff() < 1e-14);
  const Matrix p = ops::fock_parity(5);
  CHECK(p(0, 0).real() == 1.0);
  CHECK(p(3, 3).real() == -1.0);
  CHECK((p * p - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("canonical commutator [theta, n] = i on the interior") {
  const ops::OscillatorBasis b(12, 1.7, 0.9);
  const auto q = ops::quadratures(b);
  const Matrix comm = q.theta * q.n - q.n * q.theta;
  for (int k = 0; k + 1 < 12; ++k) {
    CHECK(comm(k, k).imag() == Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(comm(k, k).real()) < 1e-13);
  }
}

TEST_CASE("charge basis operators") {
  const ops::ChargeBasis b(3, 0.25);
  CHECK(b.dim() == 7);
  const auto c = ops::charge_ops(b);
  CHECK(c.n_op(0, 0).real() == Approx(-3.0));
  CHECK(c.n_op(6, 6).real() == Approx(3.0));
  // cos(theta) hops one Cooper pair with amplitude 1/2
  CHECK(c.cos_theta(0, 1).real() == Approx(0.5));
  CHECK(c.cos_theta(1, 0).real() == Approx(0.5));
  CHECK(c.cos_theta(0, 0).real() == Approx(0.0));
  CHECK_THROWS_AS(ops::ChargeBasis(2, 1.5), DomainError);
  CHECK_THROWS_AS(ops::ChargeBasis(0, 0.0), DimensionError);
}

TEST_CASE("tensor product layout: left factor slow") {
  Matrix a(2, 2);
  a << 1.0, 2.0, 3.0, 4.0;
  const Matrix t = ops::tensor(a, Matrix::Identity(3, 3));
  REQUIRE(t.rows() == 6);
  // (i_l*3 + i_r, j_l*3 + j_r) = a(i_l, j_l) * I(i_r, j_r)
  CHECK(t(0, 3).real() == Approx(2.0));
  CHECK(t(4, 1).real() == Approx(3.0));
  CHECK(t(2, 5).real() == Approx(2.0));
  CHECK(t(1, 1).real() == Approx(1.0));
}

TEST_CASE("tensor dimension guard") {
  const Matrix big = Matrix::Identity(500, 500);
  CHECK_THROWS_AS(ops::tensor(big, big), ResourceError);
}

TEST_CASE("operator cosine matches the Taylor series of the same matrix") {
  const ops::OscillatorBasis b(12, 1.3, 2.1);
  const auto q = ops::quadratures(b);
  const double offset = 0.7;
  const Matrix c = ops::operator_cosine(q.theta, offset);

  // cos(M - c) = cos(c) cos(M) + sin(c) sin(M); Taylor series of cos(M) and
  // sin(M) through M^80 converge to well below 1e-10 at this matrix norm.
  const Eigen::Index d = q.theta.rows();
  Matrix cos_m = Matrix::Identity(d, d);
  Matrix sin_m = Matrix::Zero(d, d);
  Matrix power = Matrix::Identity(d, d);
  double factorial = 1.0;
  for (int k = 1; k <= 80; ++k) {
    power = power * q.theta;
    factorial *= k;
    const int r = k % 4;
    if (k % 2 == 1)
      sin_m += ((r == 1) ? 1.0 : -1.0) / factorial * power;
    else
      cos_m += ((r == 2) ? -1.0 : 1.0) / factorial * power;
  }
  const Matrix oracle = std::cos(offset) * cos_m + std::sin(offset) * sin_m;
  CHECK((c - oracle).cwiseAbs().maxCoeff() < 1e-10);
  // spectral cosine is bounded by one
  CHECK(c.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
  CHECK_THROWS_AS(ops::operator_cosine(Matrix::Ones(3, 4), 0.0), DimensionError);
}

TEST_CASE("hermitian wrapper validates") {
  Matrix good(2, 2);
  good << 1.0, Complex(0.0, 2.0), Complex(0.0, -2.0), 3.0;
  CHECK(HermitianOperator(good).dim() == 2);
  Matrix bad(2, 2);
  bad << 1.0, 2.0, 3.0, 4.0;
  CHECK_THROWS_AS(HermitianOperator{bad}, ContractError);
  CHECK_THROWS_AS(HermitianOperator{Matrix::Ones(2, 3)}, DimensionError);
}

TEST_CASE("product operator: dense assembly equals structured apply") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> dist;
  auto randmat = [&](Eigen::Index n) {
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(dist(rng), dist(rng));
    return m;
  };

  ops::ProductOperator h(4, 5);
  h.add(randmat(4), randmat(5));
  h.add_left(randmat(4));
  h.add_right(randmat(5));

  const Matrix dense = h.dense();
  Vector v(20);
  for (int i = 0; i < 20; ++i) v(i) = Complex(dist(rng), dist(rng));
  Vector out(20);
  h.apply(v, out);
  CHECK((dense * v - out).cwiseAbs().maxCoeff() < 1e-12);

  CHECK(h.dim() == 20);
  CHECK_FALSE(h.is_real());
  CHECK_THROWS_AS(h.add(randmat(3), randmat(5)), DimensionError);
}

TEST_CASE("product operator realness and norm bound") {
  ops::ProductOperator h(3, 3);
  h.add_left(Matrix::Identity(3, 3) * 2.0);
  h.add(Matrix::Identity(3, 3), Matrix::Identity(3, 3) * -0.5);
  CHECK(h.is_real());
  CHECK(h.max_norm_bound() >= 2.5 - 1e-15);
  const Vector v = Vector::Ones(9);
  Vector out(9);
  h.apply(v, out);
  CHECK(out(0).real() == Approx(1.5));
}

TEST_CASE("product operator dense respects the dimension cap") {
  ops::ProductOperator h(500, 500);
  h.add_left(Matrix::Identity(500, 500));
  CHECK_THROWS_AS(h.dense(), ResourceError);
}
