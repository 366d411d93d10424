#include "uscqed/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace uscqed::obs {

namespace {

// View of a product-space state as the dim_photon x dim_atom matrix M with
// M(r, l) = state(l * dim_photon + r) (atom index slow, ops::tensor layout).
Eigen::Map<const Matrix> state_matrix(const Vector& state, Eigen::Index dim_atom,
                                      Eigen::Index dim_photon) {
  if (dim_atom < 1 || dim_photon < 1)
    throw DimensionError("observables: factor dimensions must be positive");
  if (state.size() != dim_atom * dim_photon)
    throw DimensionError("observables: state length " + std::to_string(state.size()) +
                         " does not factor as " + std::to_string(dim_atom) + " x " +
                         std::to_string(dim_photon));
  return {state.data(), dim_photon, dim_atom};
}

void require_normalized(const Vector& state) {
  if (std::abs(state.norm() - 1.0) > 1e-8)
    throw ContractError("observables: state is not normalized");
}

// Largest-magnitude component made real positive (the solver's convention).
void fix_phase(Eigen::Ref<Vector> v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  const Complex c = v(imax);
  if (std::abs(c) > 0.0) v *= std::abs(c) / c;
}

// Coherent-state amplitudes <r|alpha> in a truncated Fock space, renormalized
// to unit norm within the truncation.
RealVector coherent_vector(double alpha, Eigen::Index dim) {
  RealVector c(dim);
  c(0) = 1.0;
  for (Eigen::Index r = 1; r < dim; ++r)
    c(r) = c(r - 1) * alpha / std::sqrt(static_cast<double>(r));
  c /= c.norm();
  return c;
}

}  // namespace

double mode_occupation(const Vector& state, Eigen::Index dim_atom, Eigen::Index dim_photon,
                       Factor which) {
  const auto m = state_matrix(state, dim_atom, dim_photon);
  require_normalized(state);
  double total = 0.0;
  if (which == Factor::Atom) {
    for (Eigen::Index l = 0; l < dim_atom; ++l)
      total += static_cast<double>(l) * m.col(l).squaredNorm();
  } else {
    for (Eigen::Index r = 0; r < dim_photon; ++r)
      total += static_cast<double>(r) * m.row(r).squaredNorm();
  }
  return total;
}

double photon_number(const Vector& state, Eigen::Index dim_atom, Eigen::Index dim_photon) {
  return mode_occupation(state, dim_atom, dim_photon, Factor::Photon);
}

RealVector entanglement_spectrum(const Vector& state, Eigen::Index dim_atom,
                                 Eigen::Index dim_photon, Factor trace_out) {
  const auto m = state_matrix(state, dim_atom, dim_photon);
  require_normalized(state);
  // Schmidt probabilities are the squared singular values of M; diagonalize
  // the smaller Gram matrix of the two.
  Matrix gram = (dim_atom <= dim_photon) ? Matrix(m.adjoint() * m) : Matrix(m * m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw ResourceError("entanglement_spectrum: reduced-density eigensolve failed");
  const Eigen::Index kept = (trace_out == Factor::Photon) ? dim_atom : dim_photon;
  RealVector probs = RealVector::Zero(kept);
  const Eigen::Index rank = std::min(es.eigenvalues().size(), kept);
  for (Eigen::Index i = 0; i < rank; ++i)
    probs(i) = std::max(es.eigenvalues()(es.eigenvalues().size() - 1 - i), 0.0);
  return probs;
}

double parity_expectation(const Vector& state, const Matrix& parity) {
  if (parity.rows() != parity.cols() || parity.rows() != state.size())
    throw DimensionError("parity_expectation: operator and state dimensions disagree");
  require_normalized(state);
  return state.dot(parity * state).real();
}

Matrix leading_atom_vectors(const Vector& state, Eigen::Index dim_atom,
                            Eigen::Index dim_photon, int count) {
  const auto m = state_matrix(state, dim_atom, dim_photon);
  require_normalized(state);
  if (count < 1 || count > dim_atom)
    throw DimensionError("leading_atom_vectors: count out of range");
  // Reduced atomic density rho_A(l, l') = sum_r M(r, l) conj(M(r, l'))
  //                                     = conj(M'M)(l, l').
  const Matrix rho = (m.adjoint() * m).conjugate();
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  if (es.info() != Eigen::Success)
    throw ResourceError("leading_atom_vectors: reduced-density eigensolve failed");
  Matrix out(dim_atom, count);
  for (int i = 0; i < count; ++i) {
    out.col(i) = es.eigenvectors().col(dim_atom - 1 - i);
    fix_phase(out.col(i));
  }
  return out;
}

int dressed_index(const spectral::SpectralResult& result, const Matrix& atom_vectors, int m,
                  int n, Eigen::Index dim_photon) {
  const Eigen::Index dim_atom = atom_vectors.rows();
  if (m < 0 || m >= atom_vectors.cols() || n < 0 || n >= dim_photon)
    throw DimensionError("dressed_index: target state out of range");
  if (result.eigenvectors.rows() != dim_atom * dim_photon)
    throw DimensionError("dressed_index: eigenvector length does not match the factors");
  int best = 0;
  double best_weight = -1.0;
  for (int s = 0; s < result.eigenvectors.cols(); ++s) {
    const Vector column = result.eigenvectors.col(s);
    const auto ms = state_matrix(column, dim_atom, dim_photon);
    const Complex overlap = (ms.row(n) * atom_vectors.col(m).conjugate())(0, 0);
    if (std::norm(overlap) > best_weight) {
      best_weight = std::norm(overlap);
      best = s;
    }
  }
  return best;
}

// ------- dispersive shift -------

DispersiveShift dispersive_shift_chi01(const spectral::SpectralResult& bare,
                                       const Matrix& theta, double omega_r, double x,
                                       int n_levels) {
  constexpr double kResonanceWindow = 1e-3;  // GHz
  const Eigen::Index available = bare.eigenvalues.size();
  if (n_levels < 2 || n_levels > available)
    throw DimensionError("dispersive_shift_chi01: need 2 <= n_levels <= solved levels");
  if (theta.rows() != bare.eigenvectors.rows() || theta.rows() != theta.cols())
    throw DimensionError("dispersive_shift_chi01: dipole operator does not match eigenvectors");
  if (!(omega_r > 0.0)) throw DomainError("dispersive_shift_chi01: omega_r must be positive");
  if (!(x >= 0.0)) throw DomainError("dispersive_shift_chi01: x must be non-negative");

  const double pref = x * x * omega_r * omega_r;
  DispersiveShift out;
  out.terms.reserve(2 * static_cast<std::size_t>(n_levels) - 2);

  const auto contribution = [&](int a, int b) {
    const double w = bare.eigenvalues(b) - bare.eigenvalues(a);
    if (std::abs(std::abs(w) - omega_r) < kResonanceWindow)
      throw ResonanceError("dispersive_shift_chi01: transition " + std::to_string(a) + "->" +
                           std::to_string(b) + " lies within " +
                           std::to_string(kResonanceWindow) + " GHz of omega_r");
    const double d = std::abs(spectral::matrix_element(bare, theta, a, b)) / std::numbers::pi;
    return pref * 2.0 * w * d * d / (w * w - omega_r * omega_r);
  };

  for (int i = 1; i < n_levels; ++i) {
    const double term = contribution(0, i);
    out.terms.push_back(term);
    out.chi01 += term;
    if (i == 1) out.two_level += term;
  }
  for (int j = 0; j < n_levels; ++j) {
    if (j == 1) continue;
    const double term = -contribution(1, j);
    out.terms.push_back(term);
    out.chi01 += term;
    if (j == 0) out.two_level += term;
  }
  return out;
}

// ------- displaced-pair (cat) fidelity -------

double cat_fidelity(const Vector& state, Eigen::Index dim_atom, Eigen::Index dim_photon,
                    const CatReference& ref, const Matrix& atom_subspace) {
  const auto m = state_matrix(state, dim_atom, dim_photon);
  require_normalized(state);
  if (!(ref.alpha >= 0.0)) throw DomainError("cat_fidelity: alpha must be non-negative");
  if (!(ref.normalization > 0.0))
    throw DomainError("cat_fidelity: normalization must be positive");
  if (atom_subspace.rows() != dim_atom || atom_subspace.cols() != 2)
    throw DimensionError("cat_fidelity: atom_subspace must be dim_atom x 2");
  const Matrix overlap_defect =
      atom_subspace.adjoint() * atom_subspace - Matrix::Identity(2, 2);
  if (overlap_defect.cwiseAbs().maxCoeff() > 1e-8)
    throw ContractError("cat_fidelity: atom_subspace columns are not orthonormal");

  // Atomic vectors conditioned on the two coherent photon components,
  // v_pm = M^T coh_pm, projected onto the dressed subspace W: a = W'v_+,
  // b = W'v_-. The reference overlap for an orthonormal pair u1 = W z,
  // u2 = W J(z) (J the in-plane orthogonal complement) and relative phase phi
  // is N (z'a - e^{-i phi} J(z)'b); maximizing the phase and then the unit
  // vector z gives N^2 (|z'a| + |J(z)'b|)^2.
  const RealVector coh_p = coherent_vector(ref.alpha, dim_photon);
  RealVector coh_m(dim_photon);
  for (Eigen::Index r = 0; r < dim_photon; ++r)
    coh_m(r) = (r % 2 == 0) ? coh_p(r) : -coh_p(r);
  const Vector a = atom_subspace.adjoint() * Vector(m.transpose() * coh_p);
  const Vector b = atom_subspace.adjoint() * Vector(m.transpose() * coh_m);

  // |z'a| + |J(z)'b| for z = (cos t, e^{i p} sin t), J(z) = (-conj(z2), conj(z1)).
  const auto objective = [&](double t, double p) {
    const Complex z1(std::cos(t), 0.0);
    const Complex z2 = std::polar(std::sin(t), p);
    const Complex za = std::conj(z1) * a(0) + std::conj(z2) * a(1);
    const Complex jb = -z2 * b(0) + z1 * b(1);
    return std::abs(za) + std::abs(jb);
  };

  // Smooth periodic 2-parameter surface: coarse grid, then compass refinement.
  double best = 0.0, best_t = 0.0, best_p = 0.0;
  constexpr int kGridT = 48, kGridP = 96;
  for (int i = 0; i <= kGridT; ++i) {
    const double t = 0.5 * std::numbers::pi * i / kGridT;
    for (int j = 0; j < kGridP; ++j) {
      const double p = 2.0 * std::numbers::pi * j / kGridP;
      const double h = objective(t, p);
      if (h > best) best = h, best_t = t, best_p = p;
    }
  }
  for (double step = 0.1; step > 1e-10; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (const auto& [dt, dp] :
           {std::pair{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}}) {
        const double h = objective(best_t + dt, best_p + dp);
        if (h > best) best = h, best_t += dt, best_p += dp, improved = true;
      }
    }
  }

  const double fidelity = ref.normalization * ref.normalization * best * best;
  return std::clamp(fidelity, 0.0, 1.0);
}

}  // namespace uscqed::obs
