#include "uscqed/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace uscqed::models {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) {
    throw DomainError(std::string(name) + " must be positive");
  }
}

void require_levels(int n, const char* name) {
  if (n < 2) {
    throw DimensionError(std::string(name) + " needs at least 2 basis states");
  }
}

Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

}  // namespace

// ------- parameter validation -------

void CoupledLCParams::validate() const {
  require_positive(omega1, "omega1");
  require_positive(omega2, "omega2");
  if (!(x >= 0.0)) {
    throw DomainError("coupling x must be non-negative");
  }
}

void FluxoniumParams::validate() const {
  require_positive(e_j, "e_j");
  require_positive(e_c1, "e_c1");
  require_positive(e_l1, "e_l1");
  if (!std::isfinite(theta_ext)) {
    throw DomainError("theta_ext must be finite");
  }
}

void CPBParams::validate() const {
  require_positive(e_j, "e_j");
  require_positive(e_c1, "e_c1");
  if (!(std::abs(ng) <= 1.0)) {
    throw DomainError("offset charge ng must lie in [-1, 1]");
  }
}

void ResonatorParams::validate() const {
  require_positive(e_l2, "e_l2");
  require_positive(e_c2, "e_c2");
}

double ResonatorParams::omega_r() const {
  validate();
  return std::sqrt(8.0 * e_c2 * e_l2);
}

void RabiParams::validate() const {
  require_positive(omega_r, "omega_r");
  if (!(omega_a >= 0.0)) {
    throw DomainError("omega_a must be non-negative");
  }
  if (!std::isfinite(g)) {
    throw DomainError("g must be finite");
  }
}

// ------- coupled linear circuits -------

ops::ProductOperator build_coupled_lc(const CoupledLCParams& p, Gauge gauge, int n1, int n2) {
  p.validate();
  require_levels(n1, "n1");
  require_levels(n2, "n2");

  ops::ProductOperator h(n1, n2);
  h.add_left(p.omega1 * ops::fock_number(n1));
  h.add_right(p.omega2 * ops::fock_number(n2));
  if (p.x == 0.0) {
    return h;
  }

  auto [a1, ad1] = ops::fock_ladder(n1);
  auto [a2, ad2] = ops::fock_ladder(n2);
  if (gauge == Gauge::Flux) {
    const Matrix x1 = a1 + ad1;
    const Matrix x2 = a2 + ad2;
    h.add(-(p.omega2 * p.x) * x1, x2);
    h.add_left((p.omega2 * p.x * p.x) * (x1 * x1));
  } else {
    const Matrix y1 = ad1 - a1;
    const Matrix y2 = ad2 - a2;
    h.add(-(p.omega1 * p.x) * y1, y2);
    h.add_right(-(p.omega1 * p.x * p.x) * (y2 * y2));
  }
  return h;
}

std::pair<double, double> normal_modes_analytic(double omega0, double x) {
  require_positive(omega0, "omega0");
  if (!(x >= 0.0)) {
    throw DomainError("coupling x must be non-negative");
  }
  const double s = std::sqrt(1.0 + x * x);
  return {omega0 * (s + x), omega0 * (s - x)};
}

std::pair<double, double> normal_modes_exact(const CoupledLCParams& p) {
  p.validate();
  const double tr = p.omega1 * p.omega1 + p.omega2 * p.omega2 +
                    4.0 * p.x * p.x * p.omega1 * p.omega2;
  const double det = p.omega1 * p.omega1 * p.omega2 * p.omega2;
  // Eigenvalues of the 2x2 dynamical matrix are the squared mode frequencies;
  // the discriminant is non-negative whenever both bare frequencies are real.
  const double disc = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
  const double hi2 = 0.5 * (tr + disc);
  return {std::sqrt(hi2), std::sqrt(det / hi2)};
}

std::pair<double, double> coupled_lc_normal_modes(const CoupledLCParams& p, Gauge gauge,
                                                  int n1, int n2, int k,
                                                  const spectral::EigensolveOptions& solver) {
  if (k < 3) {
    throw DimensionError("normal-mode extraction needs k >= 3 eigenpairs");
  }
  const auto h = build_coupled_lc(p, gauge, n1, n2);

  // Ground state plus candidate excited states. Every coupling term changes
  // the total quantum number by 0 or +-2, so (-1)^(n1+n2) is conserved and
  // the Fock-diagonal sector masks let the iterative solver treat the even
  // sector (ground) and the odd sector (single excitations) separately --
  // halving the cluster density the Krylov space must resolve.
  double e0 = 0.0;
  Vector v0;
  RealVector excited = RealVector::Zero(k);
  Matrix excited_vecs;
  if (h.dim() <= solver.dense_threshold || solver.precision != spectral::Precision::Double) {
    const auto r = spectral::eigensolve(h, k, solver);
    e0 = r.eigenvalues(0);
    v0 = r.eigenvectors.col(0);
    excited = r.eigenvalues.tail(k - 1);
    excited_vecs = r.eigenvectors.rightCols(k - 1);
  } else {
    RealVector even(h.dim()), odd(h.dim());
    for (Eigen::Index i = 0; i < h.dim(); ++i) {
      const bool is_even = ((i / n2 + i % n2) % 2 == 0);
      even(i) = is_even ? 1.0 : 0.0;
      odd(i) = is_even ? 0.0 : 1.0;
    }
    spectral::EigensolveOptions opts = solver;
    opts.sector_mask = &even;
    const auto ground = spectral::eigensolve(h, 1, opts);
    opts.sector_mask = &odd;
    const auto ex = spectral::eigensolve(h, k - 1, opts);
    e0 = ground.eigenvalues(0);
    v0 = ground.eigenvectors.col(0);
    excited = ex.eigenvalues;
    excited_vecs = ex.eigenvectors;
  }

  auto [a1, ad1] = ops::fock_ladder(n1);
  auto [a2, ad2] = ops::fock_ladder(n2);
  std::vector<ops::ProductOperator> quads;
  for (int q = 0; q < 4; ++q) {
    quads.emplace_back(n1, n2);
  }
  quads[0].add_left(a1 + ad1);
  quads[1].add_left(ad1 - a1);
  quads[2].add_right(a2 + ad2);
  quads[3].add_right(ad2 - a2);

  // Linear spectral weight from the ground state; only single excitations of
  // the normal modes pick up O(1) weight.
  const int m = static_cast<int>(excited.size());
  RealVector weight = RealVector::Zero(m);
  Vector tmp(h.dim());
  for (const auto& q : quads) {
    q.apply(v0, tmp);
    for (int j = 0; j < m; ++j) {
      weight(j) += std::norm(excited_vecs.col(j).dot(tmp));
    }
  }

  int best = 0;
  for (int j = 1; j < m; ++j) {
    if (weight(j) > weight(best)) best = j;
  }
  int second = -1;
  for (int j = 0; j < m; ++j) {
    if (j == best) continue;
    if (second < 0 || weight(j) > weight(second)) second = j;
  }
  if (weight(second) < 1e-9 * weight(best)) {
    throw ResourceError("second normal mode not inside the computed window; increase k");
  }
  const double wa = excited(best) - e0;
  const double wb = excited(second) - e0;
  return {std::max(wa, wb), std::min(wa, wb)};
}

// ------- flux-tunneling atom -------

FluxoniumBare build_fluxonium_bare(const FluxoniumParams& p, int n_levels) {
  p.validate();
  require_levels(n_levels, "n_levels");
  const ops::OscillatorBasis basis(n_levels, p.e_c1, p.e_l1);
  const auto q = ops::quadratures(basis);
  const Matrix h = 4.0 * p.e_c1 * (q.n * q.n) + 0.5 * p.e_l1 * (q.theta * q.theta) -
                   p.e_j * ops::operator_cosine(q.theta, p.theta_ext);
  return {HermitianOperator(h), HermitianOperator(q.theta)};
}

ops::ProductOperator build_fluxonium_photon(const FluxoniumParams& atom,
                                            const ResonatorParams& res, int n1, int n2) {
  atom.validate();
  res.validate();
  require_levels(n1, "n1");
  require_levels(n2, "n2");
  const ops::OscillatorBasis b1(n1, atom.e_c1, atom.e_l1 + res.e_l2);
  const ops::OscillatorBasis b2(n2, res.e_c2, res.e_l2);
  const auto q1 = ops::quadratures(b1);
  const auto q2 = ops::quadratures(b2);

  ops::ProductOperator h(n1, n2);
  h.add_left(4.0 * atom.e_c1 * (q1.n * q1.n) +
             0.5 * (atom.e_l1 + res.e_l2) * (q1.theta * q1.theta) -
             atom.e_j * ops::operator_cosine(q1.theta, atom.theta_ext));
  h.add_right(4.0 * res.e_c2 * (q2.n * q2.n) + 0.5 * res.e_l2 * (q2.theta * q2.theta));
  h.add(-res.e_l2 * q1.theta, q2.theta);
  return h;
}

HermitianOperator build_capshunted_fluxonium(const FluxoniumParams& p, double e_c2,
                                             int n_levels) {
  require_positive(e_c2, "e_c2");
  FluxoniumParams shunted = p;
  shunted.e_c1 = capshunt_e_c(p.e_c1, e_c2);
  return build_fluxonium_bare(shunted, n_levels).h;
}

// ------- charge-tunneling atom -------

CPBBare build_cpb_bare(const CPBParams& p, int n_cut) {
  p.validate();
  if (n_cut < 1) {
    throw DimensionError("n_cut must be at least 1");
  }
  const ops::ChargeBasis basis(n_cut, p.ng);
  const auto c = ops::charge_ops(basis);
  const Matrix shifted = c.n_op + p.ng * identity(basis.dim());
  const Matrix h = 4.0 * p.e_c1 * (shifted * shifted) - p.e_j * c.cos_theta;
  return {HermitianOperator(h), HermitianOperator(c.n_op)};
}

ops::ProductOperator build_cpb_photon(const CPBParams& atom, const ResonatorParams& res,
                                      int n_cut, int n2) {
  atom.validate();
  res.validate();
  if (n_cut < 1) {
    throw DimensionError("n_cut must be at least 1");
  }
  require_levels(n2, "n2");
  const double ecr = atom.e_c1 + res.e_c2;
  const ops::OscillatorBasis b2(n2, ecr, res.e_l2);
  auto [a, ad] = ops::fock_ladder(n2);
  // Quadratures in the rotated phase convention: n2 real symmetric, theta2^2
  // real positive semidefinite, so the full assembly stays real.
  const Matrix n2_rot = b2.n_zpf() * (a + ad);
  const Matrix ybar = ad - a;
  const Matrix th2sq_rot = -(b2.theta_zpf() * b2.theta_zpf()) * (ybar * ybar);

  const ops::ChargeBasis b1(n_cut, atom.ng);
  const auto c = ops::charge_ops(b1);
  const Matrix n1s = c.n_op + atom.ng * identity(b1.dim());

  ops::ProductOperator h(b1.dim(), n2);
  h.add_left(4.0 * atom.e_c1 * (n1s * n1s) - atom.e_j * c.cos_theta);
  h.add_right(4.0 * ecr * (n2_rot * n2_rot) + 0.5 * res.e_l2 * th2sq_rot);
  h.add(8.0 * atom.e_c1 * n1s, n2_rot);
  return h;
}

ops::ProductOperator build_cpb_photon_regrouped(const CPBParams& atom,
                                                const ResonatorParams& res, int n_cut,
                                                int n2) {
  atom.validate();
  res.validate();
  if (n_cut < 1) {
    throw DimensionError("n_cut must be at least 1");
  }
  require_levels(n2, "n2");
  const double ecr = atom.e_c1 + res.e_c2;
  const double wr = cpb_omega_r(atom, res);
  const double kappa = wr * (atom.e_c1 / ecr) * 2.0 * x_charge(atom, res);

  const ops::ChargeBasis b1(n_cut, atom.ng);
  const auto c = ops::charge_ops(b1);
  const Matrix n1s = c.n_op + atom.ng * identity(b1.dim());
  auto [a, ad] = ops::fock_ladder(n2);

  ops::ProductOperator h(b1.dim(), n2);
  h.add_left(4.0 * atom.e_c1 * (n1s * n1s) - atom.e_j * c.cos_theta);
  h.add_right(wr * ops::fock_number(n2));
  h.add(kappa * n1s, a + ad);
  return h;
}

// ------- two-level quantum Rabi model -------

ops::ProductOperator build_quantum_rabi(const RabiParams& p, int n_photon) {
  p.validate();
  require_levels(n_photon, "n_photon");
  Matrix sz(2, 2);
  sz << 1.0, 0.0, 0.0, -1.0;
  Matrix sx(2, 2);
  sx << 0.0, 1.0, 1.0, 0.0;
  auto [a, ad] = ops::fock_ladder(n_photon);

  ops::ProductOperator h(2, n_photon);
  h.add_right(p.omega_r * ops::fock_number(n_photon));
  if (p.omega_a != 0.0) {
    h.add_left(0.5 * p.omega_a * sz);
  }
  if (p.g != 0.0) {
    h.add(p.g * sx, a + ad);
  }
  return h;
}

RabiParams truncate_to_rabi(const FluxoniumParams& atom, const ResonatorParams& res,
                            int n_levels) {
  atom.validate();
  res.validate();
  if (std::abs(atom.theta_ext - kPi) > 1e-9) {
    throw DomainError(
        "two-level reduction holds only at the flux degeneracy point theta_ext = pi");
  }
  const auto bare = build_fluxonium_bare(atom, n_levels);
  const auto r = spectral::eigensolve(bare.h, 2);
  const double m = std::abs(spectral::matrix_element(r, bare.theta.matrix(), 0, 1));
  const double wr = res.omega_r();
  return {wr, r.eigenvalues(1) - r.eigenvalues(0), wr * x_flux(res) * m / kPi};
}

RabiParams truncate_to_rabi(const CPBParams& atom, const ResonatorParams& res, int n_cut) {
  atom.validate();
  res.validate();
  if (std::abs(std::abs(atom.ng) - 0.5) > 1e-9) {
    throw DomainError(
        "two-level reduction holds only at the charge degeneracy point |ng| = 1/2");
  }
  const auto bare = build_cpb_bare(atom, n_cut);
  const auto r = spectral::eigensolve(bare.h, 2);
  const double m = std::abs(spectral::matrix_element(r, bare.n_op.matrix(), 0, 1));
  const double wr = cpb_omega_r(atom, res);
  const double ratio = atom.e_c1 / (atom.e_c1 + res.e_c2);
  return {wr, r.eigenvalues(1) - r.eigenvalues(0),
          wr * ratio * 2.0 * m * x_charge(atom, res)};
}

// ------- coupling-parameter maps -------

double x_flux(const ResonatorParams& res) {
  res.validate();
  return 0.5 * kPi * std::pow(res.e_l2 / (2.0 * res.e_c2), 0.25);
}

double x_charge(const CPBParams& atom, const ResonatorParams& res) {
  atom.validate();
  res.validate();
  return 0.5 * std::pow(2.0 * (atom.e_c1 + res.e_c2) / res.e_l2, 0.25);
}

double cpb_omega_r(const CPBParams& atom, const ResonatorParams& res) {
  atom.validate();
  res.validate();
  return std::sqrt(8.0 * (atom.e_c1 + res.e_c2) * res.e_l2);
}

double capshunt_e_c(double e_c1, double e_c2) {
  require_positive(e_c1, "e_c1");
  require_positive(e_c2, "e_c2");
  return e_c1 * e_c2 / (e_c1 + e_c2);
}

ResonatorParams resonator_from_x_flux(double omega_r, double x) {
  require_positive(omega_r, "omega_r");
  require_positive(x, "x");
  const double ratio = 2.0 * x / kPi;
  ResonatorParams res;
  res.e_l2 = 0.5 * omega_r * ratio * ratio;
  res.e_c2 = 0.5 * res.e_l2 / (ratio * ratio * ratio * ratio);
  return res;
}

ResonatorParams resonator_from_x_charge(double e_c1, double e_c2, double x) {
  require_positive(e_c1, "e_c1");
  require_positive(e_c2, "e_c2");
  require_positive(x, "x");
  ResonatorParams res;
  res.e_c2 = e_c2;
  res.e_l2 = (e_c1 + e_c2) / (8.0 * x * x * x * x);
  return res;
}

// ------- symmetry operators -------

Matrix coupled_mode_parity(int n1, int n2) {
  require_levels(n1, "n1");
  require_levels(n2, "n2");
  return ops::tensor(ops::fock_parity(n1), ops::fock_parity(n2));
}

Matrix rabi_parity(int n_photon) {
  require_levels(n_photon, "n_photon");
  Matrix sz(2, 2);
  sz << 1.0, 0.0, 0.0, -1.0;
  return ops::tensor(sz, ops::fock_parity(n_photon));
}

}  // namespace uscqed::models
