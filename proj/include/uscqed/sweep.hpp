#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "uscqed/models.hpp"
#include "uscqed/spectral.hpp"

// Parameter sweeps over the circuit models with per-point truncation control
// and observable columns, and the renormalized-fluxonium fit of coupled
// spectra. Output tables carry a full parameter echo and are deterministic:
// identical specs produce identical tables.

namespace uscqed::sweep {

enum class Model { CoupledLC, Fluxonium, CPB, Rabi, Capshunt };
enum class Axis { X, XSquared, ThetaExt, Ng };

struct SweepOutputs {
  int k = 6;                     // transition columns w01..w0k
  bool levels = false;           // absolute eigenvalues e0..ek
  bool photon_number = false;    // ground-state <a'a> of the photon factor
  bool entanglement = false;     // ground-state p1, p2, p_tail
  bool parity = false;           // parity0, parity1 of the lowest doublet
  bool rabi_overlay = false;     // two-level-truncation transition columns
  bool capshunt_overlay = false; // zero-shared-inductance transition columns
};

struct SweepSpec {
  Model model = Model::Fluxonium;
  Axis axis = Axis::X;
  double from = 0.0;
  double to = 1.0;
  int points = 2;

  models::CoupledLCParams lc;  // coupled-lc bare frequencies
  models::Gauge gauge = models::Gauge::Flux;
  models::FluxoniumParams fluxonium;
  models::CPBParams cpb;
  models::RabiParams rabi;     // rabi sweeps fix omega_r, omega_a; g = x omega_r

  double omega_r = 0.0;   // flux-branch pivot: resonator from (omega_r, x)
  double e_c2 = 0.0;      // charge-branch resonator capacitive energy
  double e_l2 = 0.0;      // explicit resonator inductive energy (cpb vs ng)
  double x_fixed = 0.0;   // fixed coupling for the theta_ext / ng axes

  spectral::TruncationPolicy policy;
  SweepOutputs outputs;

  void validate() const;
};

struct SweepRow {
  double axis = 0.0;
  std::vector<double> values;  // one per column; NaN marks a failed cell
  std::string error;           // empty on success
  bool converged = true;       // truncation-controller verdict for this point
};

struct SweepTable {
  std::string axis_name;
  std::vector<std::string> columns;  // excludes the axis and error columns
  std::vector<SweepRow> rows;        // in the given range order
  std::vector<std::pair<std::string, std::string>> provenance;  // key=value echo
  bool all_converged = true;  // false when any row failed or did not converge
};

// Evaluates every axis point: rebuilds the circuit (resonator_from_x_* on the
// coupling axes), converges the truncation, and fills the requested columns.
// Point failures are recorded in-row (message + NaN cells), never skipped.
SweepTable run_sweep(const SweepSpec& spec);

// Truncation convergence for the spec's model at one axis value; the result
// history records every cutoff round. Range fields of the spec are ignored.
spectral::SpectralResult converge_point(const SweepSpec& spec, double axis_value);

// ------- renormalized-fluxonium fit -------

struct FitOptions {
  int n_levels = 120;        // bare-atom basis size for model transitions
  int max_iterations = 400;  // simplex iterations per start
  int restarts = 3;          // additional perturbed starts
  double tol = 1e-12;        // function-spread stopping tolerance
  std::uint64_t seed = 0x7e57f17ULL;  // restart-perturbation seed (echoed)
};

struct RenormalizedFitResult {
  double e_j_star = 0.0;       // GHz
  double e_c_star = 0.0;       // GHz
  double e_l_star = 0.0;       // GHz
  double residual = 0.0;       // RMS GHz over all (point, transition) pairs
  double residual_init = 0.0;  // same objective evaluated at init
  int iterations = 0;          // simplex iterations summed over starts
  bool converged = true;       // any start met the spread tolerance
};

// Least-squares fit of bare-fluxonium transition curves to the target table's
// w01..w0n columns over its flux-axis rows (>= 10 usable points required).
// Derivative-free Nelder-Mead simplex with `restarts` additional starts
// perturbed +-20% from init (seeded, deterministic); non-positive parameter
// excursions are barrier-penalized. The returned residual never exceeds the
// residual at init.
RenormalizedFitResult fit_renormalized_fluxonium(const SweepTable& target, int n_transitions,
                                                 const models::FluxoniumParams& init,
                                                 const FitOptions& opts = {});

}  // namespace uscqed::sweep
