#pragma once

#include <vector>

#include "uscqed/spectral.hpp"
#include "uscqed/types.hpp"

// Physical quantities computed from eigenstates of atom (x) photon product
// Hamiltonians: mode occupation, entanglement spectrum, parity expectation,
// the second-order dispersive shift of the 0-1 atomic transition, and the
// fidelity against an entangled pair of oppositely displaced photon states.
//
// States are laid out with the atom (left) index slow, as produced by
// ops::tensor and the spectral solvers.

namespace uscqed::obs {

enum class Factor { Atom, Photon };

// <a'a> of the chosen factor for a normalized product-space state.
double mode_occupation(const Vector& state, Eigen::Index dim_atom, Eigen::Index dim_photon,
                       Factor which);

// Photon-mode occupation number <a'a> of the right factor.
double photon_number(const Vector& state, Eigen::Index dim_atom, Eigen::Index dim_photon);

// Eigenvalues of the reduced density matrix left after tracing out the named
// factor, descending. The nonzero values are independent of which factor is
// traced out (Schmidt duality); only the number of trailing zeros differs.
// Sums to one for a normalized state. Computed from the reshaped state matrix
// M via the spectrum of M'M, never from the full product-space density matrix.
RealVector entanglement_spectrum(const Vector& state, Eigen::Index dim_atom,
                                 Eigen::Index dim_photon, Factor trace_out);

// <psi|P|psi>, real for Hermitian P.
double parity_expectation(const Vector& state, const Matrix& parity);

// Leading eigenvectors of the reduced atomic density matrix as columns, by
// descending probability, each phase-fixed (largest component real positive).
// Used as the dressed atomic subspace for cat_fidelity.
Matrix leading_atom_vectors(const Vector& state, Eigen::Index dim_atom,
                            Eigen::Index dim_photon, int count);

// Index of the solved eigenstate with the largest overlap on the product of
// bare atomic state m (column of atom_vectors) and photon Fock state n.
// Identifies dressed states in the weak-coupling regime.
int dressed_index(const spectral::SpectralResult& result, const Matrix& atom_vectors, int m,
                  int n, Eigen::Index dim_photon);

// ------- dispersive shift -------

struct DispersiveShift {
  double chi01 = 0.0;         // full second-order shift over the supplied levels
  double two_level = 0.0;     // sub-result keeping only the 0-1 dipole terms
  std::vector<double> terms;  // signed per-level contributions; sums to chi01
};

// Second-order-in-x shift of the 0-1 atomic transition caused by coupling to
// a photon mode at omega_r:
//   chi01 = x^2 omega_r^2 [ sum_{i!=0} 2 w0i |d0i|^2 / (w0i^2 - omega_r^2)
//                         - sum_{j!=1} 2 w1j |d1j|^2 / (w1j^2 - omega_r^2) ]
// with w the bare atomic transition frequencies and d = <.|theta/pi|.> the
// bare dipole matrix elements. Levels whose transition magnitude lies within
// 1e-3 GHz of omega_r raise ResonanceError naming the pair (the expression
// assumes no resonance). terms holds the i-sum entries (i = 1..n-1) followed
// by the j-sum entries (j = 0, 2..n-1); two_level keeps only i=1 and j=0.
DispersiveShift dispersive_shift_chi01(const spectral::SpectralResult& bare,
                                       const Matrix& theta, double omega_r, double x,
                                       int n_levels);

// ------- displaced-pair (cat) fidelity -------

struct CatReference {
  double alpha = 0.0;                          // coherent amplitude, >= 0
  double normalization = 0.7071067811865476;   // amplitude prefactor of the pair
};

// Overlap probability of `state` with the best state of the form
//   N ( u1 (x) |+alpha>  -  e^{i phi} u2 (x) |-alpha> ),
// where |+-alpha> are coherent states of the photon factor and u1, u2 range
// over orthonormal pairs inside the two-dimensional dressed atomic subspace
// spanned by the columns of atom_subspace (dim_atom x 2, orthonormal). The
// maximization over the pair and the relative phase makes the result
// independent of the arbitrary rotation and phases the reduced-density
// diagonalization returns when its two leading eigenvalues are nearly
// degenerate -- exactly the regime where the displaced pair is a good
// description. For an orthonormal pair the normalization is exactly 1/sqrt(2)
// regardless of alpha (the two components are orthogonal through the atomic
// factors alone); at alpha = 0 both references coincide and the result is the
// best antisymmetric-combination overlap in the subspace.
double cat_fidelity(const Vector& state, Eigen::Index dim_atom, Eigen::Index dim_photon,
                    const CatReference& ref, const Matrix& atom_subspace);

}  // namespace uscqed::obs
