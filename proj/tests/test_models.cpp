// Model-builder checks against closed-form circuit physics: normal modes of
// two coupled LC circuits in both gauges, quadratic limits of the atom-photon
// Hamiltonians, charge-basis degeneracy points, the regrouped photon-coupling
// identity, two-level reductions, and the (omega_r, x) parameter maps.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "uscqed/models.hpp"
#include "uscqed/operators.hpp"
#include "uscqed/spectral.hpp"

using namespace uscqed;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

double max_commutator(const Matrix& h, const Matrix& p) {
  return (h * p - p * h).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("equal-frequency normal modes: closed form") {
  // omega0 (sqrt(1+x^2) +- x): frozen at x = 1 and x = 4
  const auto m1 = models::normal_modes_analytic(1.0, 1.0);
  CHECK(m1.first == Approx(2.414213562373095).epsilon(1e-14));
  CHECK(m1.second == Approx(0.4142135623730951).epsilon(1e-14));
  const auto m4 = models::normal_modes_analytic(1.0, 4.0);
  CHECK(m4.first == Approx(8.123105625617661).epsilon(1e-14));
  CHECK(m4.second == Approx(0.1231056256176606).epsilon(1e-14));
  CHECK_THROWS_AS(models::normal_modes_analytic(-1.0, 0.5), DomainError);
}

TEST_CASE("coupled LC: numerical normal modes match the closed form") {
  models::CoupledLCParams p;
  p.omega1 = 1.0;
  p.omega2 = 1.0;
  p.x = 1.0;
  const auto exact = models::normal_modes_analytic(1.0, 1.0);
  for (const auto gauge : {models::Gauge::Flux, models::Gauge::Charge}) {
    const auto num = models::coupled_lc_normal_modes(p, gauge, 50, 50, 10);
    CHECK(num.first == Approx(exact.first).epsilon(1e-8));
    CHECK(num.second == Approx(exact.second).epsilon(1e-8));
  }
}

TEST_CASE("coupled LC: gauges agree for unequal bare frequencies") {
  // The classical dynamical matrix of the circuit has trace
  // w1^2 + w2^2 + 4 x^2 w1 w2 and determinant (w1 w2)^2 in either gauge;
  // frozen at (1, 2, 0.3): normal modes 2.2145895792421895, 0.9031018743817895.
  models::CoupledLCParams p;
  p.omega1 = 1.0;
  p.omega2 = 2.0;
  p.x = 0.3;
  const auto closed = models::normal_modes_exact(p);
  CHECK(closed.first == Approx(2.2145895792421895).epsilon(1e-14));
  CHECK(closed.second == Approx(0.9031018743817895).epsilon(1e-14));
  for (const auto gauge : {models::Gauge::Flux, models::Gauge::Charge}) {
    const auto num = models::coupled_lc_normal_modes(p, gauge, 40, 40, 8);
    CHECK(num.first == Approx(closed.first).epsilon(1e-8));
    CHECK(num.second == Approx(closed.second).epsilon(1e-8));
  }

  // the closed form reduces to the equal-frequency expression
  models::CoupledLCParams eq;
  eq.omega1 = eq.omega2 = 1.7;
  eq.x = 0.8;
  const auto from_matrix = models::normal_modes_exact(eq);
  const auto from_formula = models::normal_modes_analytic(1.7, 0.8);
  CHECK(from_matrix.first == Approx(from_formula.first).epsilon(1e-13));
  CHECK(from_matrix.second == Approx(from_formula.second).epsilon(1e-13));

  // and the low spectra agree level by level
  const auto rf = spectral::eigensolve(
      models::build_coupled_lc(p, models::Gauge::Flux, 50, 50), 10);
  const auto rc = spectral::eigensolve(
      models::build_coupled_lc(p, models::Gauge::Charge, 50, 50), 10);
  for (int j = 0; j < 10; ++j)
    CHECK(rf.eigenvalues(j) == Approx(rc.eigenvalues(j)).epsilon(1e-8));
}

TEST_CASE("coupled LC: decoupled limit is the bare ladder") {
  models::CoupledLCParams p;
  p.omega1 = 1.3;
  p.omega2 = 0.7;
  p.x = 0.0;
  const auto r =
      spectral::eigensolve(models::build_coupled_lc(p, models::Gauge::Flux, 12, 12), 6);
  const double expected[6] = {0.0, 0.7, 1.3, 1.4, 2.0, 2.1};
  for (int j = 0; j < 6; ++j)
    CHECK(r.eigenvalues(j) - r.eigenvalues(0) == Approx(expected[j]).epsilon(1e-12));
  CHECK(std::abs(r.eigenvalues(0)) < 1e-12);
}

TEST_CASE("flux-tunneling atom at half flux quantum: pinned spectrum") {
  models::FluxoniumParams p;
  p.e_j = 5.0;
  p.e_c1 = 5.0;
  p.e_l1 = 0.5;
  p.theta_ext = kPi;
  const auto bare = models::build_fluxonium_bare(p, 120);
  const auto r = spectral::eigensolve(bare.h, 3);
  const double w01 = r.eigenvalues(1) - r.eigenvalues(0);
  const double w02 = r.eigenvalues(2) - r.eigenvalues(0);
  CHECK(w01 == Approx(2.47).epsilon(0.01));
  CHECK(w02 > 3.0 * w01);
  // the lowest doublet lives in the two wells: dipole close to the well
  // separation theta = +-pi gives |<0|theta|1>| near pi
  const double m = std::abs(spectral::matrix_element(r, bare.theta.matrix(), 0, 1));
  CHECK(m == Approx(kPi).epsilon(0.15));

  // truncation convergence of the pinned transition
  const auto r2 = spectral::eigensolve(models::build_fluxonium_bare(p, 160).h, 3);
  CHECK(w01 == Approx(r2.eigenvalues(1) - r2.eigenvalues(0)).epsilon(1e-9));
}

TEST_CASE("atom-photon flux coupling: quadratic limit has exact normal modes") {
  // With e_j -> 0 the atom+photon Hamiltonian is two coupled oscillators;
  // theta-double-dot = -8 e_c1 [(e_l1+e_l2) theta1 - e_l2 theta2], etc.
  // At (e_c1, e_l1, e_c2, e_l2) = (1, 2, 3, 4) the mode frequencies are
  // 11.506462335668857 and 3.406071713548322.
  models::FluxoniumParams atom;
  atom.e_j = 1e-10;
  atom.e_c1 = 1.0;
  atom.e_l1 = 2.0;
  atom.theta_ext = 0.0;
  models::ResonatorParams res;
  res.e_c2 = 3.0;
  res.e_l2 = 4.0;
  const auto h = models::build_fluxonium_photon(atom, res, 40, 40);
  const auto r = spectral::eigensolve(h, 12);
  const double w_minus = r.eigenvalues(1) - r.eigenvalues(0);
  CHECK(w_minus == Approx(3.406071713548322).epsilon(1e-7));
  double best = 1e300;
  for (int j = 2; j < 12; ++j)
    best = std::min(best, std::abs(r.eigenvalues(j) - r.eigenvalues(0) - 11.506462335668857));
  CHECK(best < 1e-6);
}

TEST_CASE("capacitively shunted atom uses the series charging energy") {
  CHECK(models::capshunt_e_c(10.0, 2.5) == Approx(2.0).epsilon(1e-14));
  models::FluxoniumParams p;
  p.e_j = 5.0;
  p.e_c1 = 10.0;
  p.e_l1 = 0.5;
  p.theta_ext = kPi;
  const auto shunted = models::build_capshunted_fluxonium(p, 2.5, 80);
  models::FluxoniumParams q = p;
  q.e_c1 = 2.0;
  const auto direct = models::build_fluxonium_bare(q, 80).h;
  const auto r1 = spectral::eigensolve(shunted, 4);
  const auto r2 = spectral::eigensolve(direct, 4);
  for (int j = 0; j < 4; ++j)
    CHECK(r1.eigenvalues(j) == Approx(r2.eigenvalues(j)).epsilon(1e-13));
}

TEST_CASE("charge-tunneling atom at the degeneracy point") {
  // For e_j << e_c1 at |ng| = 1/2 the lowest doublet is the symmetric and
  // antisymmetric combination of two charge states: splitting e_j and
  // |<0|n|1>| = 1/2, both to O(e_j/e_c1) corrections.
  models::CPBParams p;
  p.e_j = 0.1;
  p.e_c1 = 10.0;
  p.ng = 0.5;
  const auto bare = models::build_cpb_bare(p, 12);
  const auto r = spectral::eigensolve(bare.h, 2);
  CHECK(r.eigenvalues(1) - r.eigenvalues(0) == Approx(0.1).epsilon(1e-3));
  CHECK(std::abs(spectral::matrix_element(r, bare.n_op.matrix(), 0, 1)) ==
        Approx(0.5).epsilon(1e-3));
}

TEST_CASE("charge dispersion is 1-periodic and even in the offset charge") {
  models::CPBParams p;
  p.e_j = 2.0;
  p.e_c1 = 10.0;
  auto splitting = [&](double ng) {
    models::CPBParams q = p;
    q.ng = ng;
    const auto r = spectral::eigensolve(models::build_cpb_bare(q, 14).h, 2);
    return r.eigenvalues(1) - r.eigenvalues(0);
  };
  CHECK(splitting(0.3) == Approx(splitting(-0.7)).epsilon(1e-10));
  CHECK(splitting(0.3) == Approx(splitting(-0.3)).epsilon(1e-10));
}

TEST_CASE("regrouped photon coupling: identical transition spectra") {
  // Beyond weak coupling the photon mode is strongly displaced per charge
  // sector (alpha ~ 2x kappa/omega_r), so the photon basis must hold the
  // displaced states of every low sector before the two groupings meet.
  models::CPBParams atom;
  atom.e_j = 2.0;
  atom.e_c1 = 10.0;
  atom.ng = 0.25;
  const auto res = models::resonator_from_x_charge(atom.e_c1, 1.0, 2.0);
  const auto direct = spectral::eigensolve(models::build_cpb_photon(atom, res, 8, 120), 6);
  const auto regrouped =
      spectral::eigensolve(models::build_cpb_photon_regrouped(atom, res, 8, 120), 6);
  for (int j = 1; j < 6; ++j)
    CHECK(direct.eigenvalues(j) - direct.eigenvalues(0) ==
          Approx(regrouped.eigenvalues(j) - regrouped.eigenvalues(0)).epsilon(1e-6));
}

TEST_CASE("photon coupling strength: three equivalent forms") {
  // omega_r (e_c1/(e_c1+e_c2)) 2x == 8 e_c1 n_zpf == 2^(7/4) e_c1 (e_l2/ecr)^(1/4)
  models::CPBParams atom;
  atom.e_j = 2.0;
  atom.e_c1 = 10.0;
  models::ResonatorParams res;
  res.e_c2 = 1.0;
  res.e_l2 = 0.25;
  const double ecr = atom.e_c1 + res.e_c2;
  const double k1 =
      models::cpb_omega_r(atom, res) * (atom.e_c1 / ecr) * 2.0 * models::x_charge(atom, res);
  const double k2 = 8.0 * atom.e_c1 * ops::OscillatorBasis(2, ecr, res.e_l2).n_zpf();
  const double k3 = std::pow(2.0, 1.75) * atom.e_c1 * std::pow(res.e_l2 / ecr, 0.25);
  CHECK(k1 == Approx(13.05988411451221).epsilon(1e-12));
  CHECK(k2 == Approx(k1).epsilon(1e-12));
  CHECK(k3 == Approx(k1).epsilon(1e-12));
}

TEST_CASE("quantum Rabi at zero splitting: displaced-oscillator ground state") {
  // omega_a = 0 decouples the two displaced wells: E0 = -g^2/omega_r, twofold
  models::RabiParams p;
  p.omega_r = 1.0;
  p.omega_a = 0.0;
  p.g = 1.0;
  const auto r = spectral::eigensolve(models::build_quantum_rabi(p, 60), 2);
  CHECK(r.eigenvalues(0) == Approx(-1.0).epsilon(1e-10));
  CHECK(r.eigenvalues(1) - r.eigenvalues(0) < 1e-10);
}

TEST_CASE("quantum Rabi doublet splitting: deep-coupling asymptote") {
  // splitting -> omega_a exp(-2 g^2/omega_r^2) deep in the coupled regime:
  // 3.3546262790251185e-05 at omega_a = 0.1, g = 2, omega_r = 1
  models::RabiParams p;
  p.omega_r = 1.0;
  p.omega_a = 0.1;
  p.g = 2.0;
  const auto r = spectral::eigensolve(models::build_quantum_rabi(p, 120), 2);
  const double split = r.eigenvalues(1) - r.eigenvalues(0);
  CHECK(split == Approx(3.3546262790251185e-05).epsilon(0.15));
}

TEST_CASE("parity commutes with the symmetric Hamiltonians") {
  models::RabiParams rp;
  rp.omega_r = 1.0;
  rp.omega_a = 0.7;
  rp.g = 1.3;
  const Matrix hr = models::build_quantum_rabi(rp, 30).dense();
  CHECK(max_commutator(hr, models::rabi_parity(30)) < 1e-10);

  models::FluxoniumParams atom;
  atom.e_j = 5.0;
  atom.e_c1 = 5.0;
  atom.e_l1 = 0.5;
  atom.theta_ext = kPi;
  models::ResonatorParams res;
  res.e_c2 = 1.0;
  res.e_l2 = 0.25;
  const Matrix hf = models::build_fluxonium_photon(atom, res, 40, 30).dense();
  CHECK(max_commutator(hf, models::coupled_mode_parity(40, 30)) < 1e-10);

  // away from half flux quantum the reflection is broken
  atom.theta_ext = 2.0;
  const Matrix hb = models::build_fluxonium_photon(atom, res, 40, 30).dense();
  CHECK(max_commutator(hb, models::coupled_mode_parity(40, 30)) > 1e-3);
}

TEST_CASE("two-level reduction from the flux-tunneling atom") {
  models::FluxoniumParams atom;
  atom.e_j = 5.0;
  atom.e_c1 = 5.0;
  atom.e_l1 = 0.5;
  atom.theta_ext = kPi;
  const auto res = models::resonator_from_x_flux(2.47, 3.0);
  const auto rp = models::truncate_to_rabi(atom, res, 120);
  CHECK(rp.omega_r == Approx(2.47).epsilon(1e-12));
  CHECK(rp.omega_a == Approx(2.47).epsilon(0.01));
  // g = omega_r x m/pi with m = |<0|theta|1>| close to pi
  const auto bare = models::build_fluxonium_bare(atom, 120);
  const auto rb = spectral::eigensolve(bare.h, 2);
  const double m = std::abs(spectral::matrix_element(rb, bare.theta.matrix(), 0, 1));
  CHECK(rp.g == Approx(2.47 * 3.0 * m / kPi).epsilon(1e-12));

  atom.theta_ext = 0.9 * kPi;
  CHECK_THROWS_AS(models::truncate_to_rabi(atom, res, 120), DomainError);
}

TEST_CASE("two-level reduction from the charge-tunneling atom") {
  // deep charge regime: m -> 1/2 so g -> omega_r (e_c1/ecr) x
  models::CPBParams atom;
  atom.e_j = 0.05;
  atom.e_c1 = 20.0;
  atom.ng = -0.5;
  models::ResonatorParams res;
  res.e_c2 = 2.0;
  res.e_l2 = 0.5;
  const auto rp = models::truncate_to_rabi(atom, res, 12);
  CHECK(rp.omega_a == Approx(0.05).epsilon(1e-3));
  const double expected_g =
      models::cpb_omega_r(atom, res) * (20.0 / 22.0) * models::x_charge(atom, res);
  CHECK(rp.g == Approx(expected_g).epsilon(1e-3));

  atom.ng = 0.3;
  CHECK_THROWS_AS(models::truncate_to_rabi(atom, res, 12), DomainError);
}

TEST_CASE("resonator parameter maps: frozen inversions and round trips") {
  // flux branch at (omega_r, x) = (2.47, 4)
  const auto res = models::resonator_from_x_flux(2.47, 4.0);
  CHECK(res.e_l2 == Approx(8.008426355090378).epsilon(1e-12));
  CHECK(res.e_c2 == Approx(0.0952262612136356).epsilon(1e-12));
  CHECK(res.omega_r() == Approx(2.47).epsilon(1e-12));
  CHECK(models::x_flux(res) == Approx(4.0).epsilon(1e-12));

  // charge branch at (e_c1, e_c2, e_l2) = (10, 1, 0.25)
  models::CPBParams atom;
  atom.e_j = 2.0;
  atom.e_c1 = 10.0;
  models::ResonatorParams r2;
  r2.e_c2 = 1.0;
  r2.e_l2 = 0.25;
  const double x = models::x_charge(atom, r2);
  CHECK(x == Approx(1.531407156804393).epsilon(1e-12));
  CHECK(models::cpb_omega_r(atom, r2) == Approx(std::sqrt(22.0)).epsilon(1e-14));
  const auto back = models::resonator_from_x_charge(10.0, 1.0, x);
  CHECK(back.e_l2 == Approx(0.25).epsilon(1e-12));

  CHECK_THROWS_AS(models::resonator_from_x_flux(2.47, 0.0), DomainError);
  CHECK_THROWS_AS(models::resonator_from_x_charge(10.0, 1.0, 0.0), DomainError);
}

TEST_CASE("parameter validation") {
  models::CoupledLCParams lc;
  lc.omega1 = -1.0;
  CHECK_THROWS_AS(models::build_coupled_lc(lc, models::Gauge::Flux, 10, 10), DomainError);
  lc.omega1 = 1.0;
  lc.x = -0.1;
  CHECK_THROWS_AS(models::build_coupled_lc(lc, models::Gauge::Flux, 10, 10), DomainError);
  lc.x = 0.1;
  CHECK_THROWS_AS(models::build_coupled_lc(lc, models::Gauge::Flux, 1, 10), DimensionError);

  models::CPBParams cpb;
  cpb.e_j = 1.0;
  cpb.e_c1 = 1.0;
  cpb.ng = 1.2;
  CHECK_THROWS_AS(models::build_cpb_bare(cpb, 5), DomainError);

  models::RabiParams rp;
  rp.omega_r = 1.0;
  rp.omega_a = -0.5;
  CHECK_THROWS_AS(models::build_quantum_rabi(rp, 10), DomainError);
}
