#pragma once

#include <utility>

#include "uscqed/operators.hpp"
#include "uscqed/spectral.hpp"
#include "uscqed/types.hpp"

// Circuit Hamiltonian builders: coupled linear LC modes in both gauges, the
// flux-tunneling atom (inductively shunted junction) bare and with a photon
// mode, the charge-tunneling atom (Cooper-pair box) bare and with a photon
// mode, the two-level quantum Rabi reduction, and the (omega_r, x) <->
// resonator-parameter maps. All energies are frequencies in GHz; theta is the
// dimensionless flux 2*pi*phi/Phi_0 and n the pair number Q/2e. Zero-point
// constant offsets are not added: only eigenvalue differences are meaningful.

namespace uscqed::models {

enum class Gauge { Flux, Charge };

// ------- parameter sets -------

struct CoupledLCParams {
  double omega1 = 1.0;  // parallel-mode frequency, GHz
  double omega2 = 1.0;  // series-mode frequency, GHz
  double x = 0.0;       // dimensionless coupling (1/2)sqrt(Z1/Z2)
  void validate() const;
};

struct FluxoniumParams {
  double e_j = 0.0;        // Josephson energy, GHz
  double e_c1 = 0.0;       // atom charging energy, GHz
  double e_l1 = 0.0;       // shunt inductive energy, GHz
  double theta_ext = 0.0;  // external flux in radians; pi = half flux quantum
  void validate() const;
};

struct CPBParams {
  double e_j = 0.0;   // Josephson energy, GHz
  double e_c1 = 0.0;  // island charging energy, GHz
  double ng = 0.0;    // offset charge in units of 2e, |ng| <= 1
  void validate() const;
};

struct ResonatorParams {
  double e_l2 = 0.0;  // resonator inductive energy, GHz
  double e_c2 = 0.0;  // resonator charging energy, GHz
  void validate() const;
  double omega_r() const;  // bare series-mode frequency sqrt(8*e_c2*e_l2)
};

struct RabiParams {
  double omega_r = 0.0;  // photon frequency, GHz
  double omega_a = 0.0;  // two-level splitting, GHz
  double g = 0.0;        // coupling, GHz
  void validate() const;
};

// ------- coupled linear circuits -------

// H = w1 a1'a1 + w2 a2'a2 + coupling. Flux gauge couples the flux quadratures
// (a+a') with the series-mode inductance, charge gauge couples the charge
// quadratures (a'-a) with the parallel-mode capacitance:
//   flux:   - w2*x (a1+a1')(a2+a2') + w2*x^2 (a1+a1')^2
//   charge: - w1*x (a1'-a1)(a2'-a2) - w1*x^2 (a2'-a2)^2
// Both are exact images of the same circuit under U = exp(-i Q2 phi1 / hbar),
// so their spectra agree for every (w1, w2, x).
ops::ProductOperator build_coupled_lc(const CoupledLCParams& p, Gauge gauge, int n1, int n2);

// Exact normal modes at omega1 = omega2 = omega0: omega0*(sqrt(1+x^2) +- x).
// Returned as (higher, lower).
std::pair<double, double> normal_modes_analytic(double omega0, double x);

// Exact normal modes for arbitrary frequencies, from the classical dynamical
// matrix of the circuit: trace w1^2 + w2^2 + 4 x^2 w1 w2, determinant
// (w1 w2)^2. Returned as (higher, lower).
std::pair<double, double> normal_modes_exact(const CoupledLCParams& p);

// Numerical normal modes extracted from the lowest k eigenpairs by linear
// spectral weight: the two excited states reached from the ground state by
// the single-mode quadratures. Returned as (higher, lower). On the iterative
// path the candidates come from the odd total-quanta parity sector (where
// every single excitation lives), so k counts odd-sector states there.
std::pair<double, double> coupled_lc_normal_modes(const CoupledLCParams& p, Gauge gauge,
                                                  int n1, int n2, int k,
                                                  const spectral::EigensolveOptions& solver = {});

// ------- flux-tunneling atom -------

struct FluxoniumBare {
  HermitianOperator h;
  HermitianOperator theta;  // phase operator in the same basis, for dipoles
};

// H = 4 e_c1 n^2 + (1/2) e_l1 theta^2 - e_j cos(theta - theta_ext) in the
// oscillator basis of (e_c1, e_l1).
FluxoniumBare build_fluxonium_bare(const FluxoniumParams& p, int n_levels);

// Atom + photon in the flux gauge; the shared-inductance term is expanded
// exactly, so mode 1 carries the full quadratic coefficient e_l1 + e_l2:
// [4 e_c1 n1^2 + (1/2)(e_l1+e_l2) theta1^2 - e_j cos(theta1 - theta_ext)]
// + [4 e_c2 n2^2 + (1/2) e_l2 theta2^2] - e_l2 theta1 theta2.
ops::ProductOperator build_fluxonium_photon(const FluxoniumParams& atom,
                                            const ResonatorParams& res, int n1, int n2);

// Zero-inductance limit of the photon mode: the bare atom with its charging
// energy replaced by the series combination e_c1*e_c2/(e_c1+e_c2).
HermitianOperator build_capshunted_fluxonium(const FluxoniumParams& p, double e_c2,
                                             int n_levels);

// ------- charge-tunneling atom -------

struct CPBBare {
  HermitianOperator h;
  HermitianOperator n_op;  // pair-number operator, for dipoles
};

// H = 4 e_c1 (n + ng)^2 - e_j cos_theta in the charge basis.
CPBBare build_cpb_bare(const CPBParams& p, int n_cut);

// Atom + photon in the charge gauge, assembled exactly:
// 4 e_c1 (n1 + n2 + ng)^2 - e_j cos_theta1 + 4 e_c2 n2^2 + (1/2) e_l2 theta2^2
// with the photon basis built from the renormalized charging energy
// e_c1 + e_c2 (series-combined capacitance). The photon quadratures use the
// phase convention that makes n2 real, so the assembled matrix is real.
ops::ProductOperator build_cpb_photon(const CPBParams& atom, const ResonatorParams& res,
                                      int n_cut, int n2);

// Regrouped cross-check build: atom + omega_r a'a + kappa (n1 + ng)(a + a')
// with kappa = omega_r * (e_c1/(e_c1+e_c2)) * 2x. Transition spectra must
// match build_cpb_photon; absolute offsets differ by dropped constants.
ops::ProductOperator build_cpb_photon_regrouped(const CPBParams& atom,
                                                const ResonatorParams& res, int n_cut,
                                                int n2);

// ------- two-level quantum Rabi model -------

// H = omega_r a'a + (omega_a/2) sz + g sx (a + a') on atom (x) photon.
ops::ProductOperator build_quantum_rabi(const RabiParams& p, int n_photon);

// Two-level reductions at the degeneracy points. The dipole matrix element is
// computed from the bare atom spectrum with n_levels (or n_cut) basis states:
//   flux:   g = omega_r * x * |<0|theta1|1>| / pi,  x = (pi/2)(e_l2/(2 e_c2))^(1/4)
//   charge: g = omega_r * (e_c1/(e_c1+e_c2)) * 2|<0|n1|1>| * x,
//           x = (1/2)(2(e_c1+e_c2)/e_l2)^(1/4)
// Requires theta_ext = pi (resp. |ng| = 1/2) to 1e-9; elsewhere the reduction
// picks up a transverse bias term and is refused.
RabiParams truncate_to_rabi(const FluxoniumParams& atom, const ResonatorParams& res,
                            int n_levels);
RabiParams truncate_to_rabi(const CPBParams& atom, const ResonatorParams& res, int n_cut);

// ------- coupling-parameter maps -------

double x_flux(const ResonatorParams& res);
double x_charge(const CPBParams& atom, const ResonatorParams& res);
double cpb_omega_r(const CPBParams& atom, const ResonatorParams& res);  // sqrt(8(ec1+ec2)el2)
double capshunt_e_c(double e_c1, double e_c2);  // series charging energy

// Inversions of the x definitions. Flux branch holds omega_r fixed:
// e_l2 = (omega_r/2)(2x/pi)^2, e_c2 = e_l2 (pi/2x)^4 / 2. Charge branch holds
// the capacitive energies fixed: e_l2 = (e_c1+e_c2)/(8 x^4), so the bare
// photon frequency (e_c1+e_c2)/x^2 diverges as x -> 0. x = 0 is out of
// domain for both branches.
ResonatorParams resonator_from_x_flux(double omega_r, double x);
ResonatorParams resonator_from_x_charge(double e_c1, double e_c2, double x);

// ------- symmetry operators -------

// Simultaneous reflection (theta_q, n_q) -> (-theta_q, -n_q) of both modes.
Matrix coupled_mode_parity(int n1, int n2);

// sz (x) exp(i pi a'a); commutes with every quantum Rabi Hamiltonian.
Matrix rabi_parity(int n_photon);

}  // namespace uscqed::models
