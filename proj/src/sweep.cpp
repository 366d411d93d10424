#include "uscqed/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "uscqed/format.hpp"
#include "uscqed/observables.hpp"
#include "uscqed/operators.hpp"
#include "uscqed/types.hpp"

namespace uscqed::sweep {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfChargePointTol = 1e-9;  // matches the two-level reduction guard

const char* model_name(Model m) {
  switch (m) {
    case Model::CoupledLC: return "coupled-lc";
    case Model::Fluxonium: return "fluxonium";
    case Model::CPB: return "cpb";
    case Model::Rabi: return "rabi";
    case Model::Capshunt: return "capshunt";
  }
  throw ContractError("sweep: unknown model");
}

const char* axis_name(Axis a) {
  switch (a) {
    case Axis::X: return "x";
    case Axis::XSquared: return "x_squared";
    case Axis::ThetaExt: return "theta_ext";
    case Axis::Ng: return "ng";
  }
  throw ContractError("sweep: unknown axis");
}

bool coupling_axis(Axis a) { return a == Axis::X || a == Axis::XSquared; }

// Number of independent truncation knobs the controller grows for a model.
// Two-factor circuits converge both bases; the two-level Rabi model and the
// single-mode capacitively shunted atom have one basis each.
int model_knobs(Model m) { return (m == Model::Rabi || m == Model::Capshunt) ? 1 : 2; }

// Hilbert-space factor dimensions (atom, photon) produced by the knob values.
// The charge-basis knob is the charge cutoff, so its matrix dimension is
// 2*n_cut + 1; single-factor models get a trivial right factor.
std::pair<Eigen::Index, Eigen::Index> factor_dims(Model m, const std::vector<int>& dims) {
  switch (m) {
    case Model::CoupledLC:
    case Model::Fluxonium: return {dims[0], dims[1]};
    case Model::CPB: return {2 * static_cast<Eigen::Index>(dims[0]) + 1, dims[1]};
    case Model::Rabi: return {2, dims[0]};
    case Model::Capshunt: return {dims[0], 1};
  }
  throw ContractError("sweep: unknown model");
}

std::string dims_string(const std::vector<int>& dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(dims[i]);
  }
  return s;
}

// Grid point i of the inclusive range. The symmetric weighted form (rather
// than from + span*t) makes reversing the range produce bitwise-identical
// values in reversed order, and the endpoints are taken exactly.
double axis_value(double from, double to, int points, int i) {
  if (i == 0) return from;
  if (i == points - 1) return to;
  return (from * (points - 1 - i) + to * i) / (points - 1);
}

double axis_to_x(Axis axis, double v) {
  if (axis == Axis::XSquared) {
    if (v < 0.0) throw DomainError("sweep: x_squared axis value must be nonnegative");
    return std::sqrt(v);
  }
  return v;
}

// Wraps a single-factor Hamiltonian so the truncation controller (whose
// factories produce two-factor products) can grow its one basis.
ops::ProductOperator single_factor(const Matrix& h) {
  ops::ProductOperator po(h.rows(), 1);
  po.add_left(h);
  return po;
}

std::vector<std::string> transition_columns(const std::string& prefix, int k) {
  std::vector<std::string> cols;
  for (int i = 1; i <= k; ++i) cols.push_back(prefix + "w0" + std::to_string(i));
  return cols;
}

std::vector<std::string> make_columns(const SweepSpec& spec) {
  std::vector<std::string> cols = transition_columns("", spec.outputs.k);
  if (spec.model == Model::CoupledLC) {
    cols.insert(cols.end(),
                {"mode_high_num", "mode_low_num", "mode_high_exact", "mode_low_exact"});
  }
  if (spec.outputs.levels)
    for (int i = 0; i <= spec.outputs.k; ++i) cols.push_back("e" + std::to_string(i));
  if (spec.outputs.photon_number) cols.push_back("photon_number");
  if (spec.outputs.entanglement) cols.insert(cols.end(), {"p1", "p2", "p_tail"});
  if (spec.outputs.parity) cols.insert(cols.end(), {"parity0", "parity1"});
  if (spec.outputs.rabi_overlay) {
    auto extra = transition_columns("rabi_", spec.outputs.k);
    cols.insert(cols.end(), extra.begin(), extra.end());
  }
  if (spec.outputs.capshunt_overlay) {
    auto extra = transition_columns("capshunt_", spec.outputs.k);
    cols.insert(cols.end(), extra.begin(), extra.end());
  }
  return cols;
}

void add_kv(std::vector<std::pair<std::string, std::string>>& p, const std::string& key,
            double v) {
  p.emplace_back(key, format_exact(v));  // echo must re-parse bit-exactly
}

std::vector<std::pair<std::string, std::string>> make_provenance(const SweepSpec& spec) {
  std::vector<std::pair<std::string, std::string>> p;
  p.emplace_back("model", model_name(spec.model));
  p.emplace_back("axis", axis_name(spec.axis));
  add_kv(p, "from", spec.from);
  add_kv(p, "to", spec.to);
  p.emplace_back("points", std::to_string(spec.points));
  switch (spec.model) {
    case Model::CoupledLC:
      add_kv(p, "omega1", spec.lc.omega1);
      add_kv(p, "omega2", spec.lc.omega2);
      p.emplace_back("gauge", spec.gauge == models::Gauge::Flux ? "flux" : "charge");
      break;
    case Model::Fluxonium:
    case Model::Capshunt:
      add_kv(p, "e_j", spec.fluxonium.e_j);
      add_kv(p, "e_c1", spec.fluxonium.e_c1);
      add_kv(p, "e_l1", spec.fluxonium.e_l1);
      add_kv(p, "theta_ext", spec.fluxonium.theta_ext);
      add_kv(p, "omega_r", spec.omega_r);
      break;
    case Model::CPB:
      add_kv(p, "e_j", spec.cpb.e_j);
      add_kv(p, "e_c1", spec.cpb.e_c1);
      add_kv(p, "ng", spec.cpb.ng);
      add_kv(p, "e_c2", spec.e_c2);
      if (spec.e_l2 > 0.0) add_kv(p, "e_l2", spec.e_l2);
      break;
    case Model::Rabi:
      add_kv(p, "omega_r", spec.rabi.omega_r);
      add_kv(p, "omega_a", spec.rabi.omega_a);
      break;
  }
  if (spec.axis == Axis::ThetaExt || spec.axis == Axis::Ng) add_kv(p, "x_fixed", spec.x_fixed);
  p.emplace_back("truncation_start", dims_string(spec.policy.start_dims));
  p.emplace_back("truncation_max", dims_string(spec.policy.max_dims));
  p.emplace_back("truncation_step", std::to_string(spec.policy.step));
  p.emplace_back("truncation_k", std::to_string(spec.policy.k));
  add_kv(p, "truncation_tol", spec.policy.tol);
  p.emplace_back("precision",
                 spec.policy.solver.precision == spectral::Precision::LongDouble
                     ? "long-double"
                     : "double");
  return p;
}

// Truncation policy adapted to the model: the knob count is forced to the
// model's arity (replicating the first entry when the spec carries the
// two-knob default) and enough eigenpairs are requested for every column.
spectral::TruncationPolicy adapt_policy(const SweepSpec& spec) {
  spectral::TruncationPolicy pol = spec.policy;
  const std::size_t knobs = static_cast<std::size_t>(model_knobs(spec.model));
  auto coerce = [knobs](std::vector<int>& v) {
    if (v.empty()) throw ContractError("sweep: truncation policy has no dimensions");
    if (v.size() != knobs) v.assign(knobs, v.front());
  };
  coerce(pol.start_dims);
  coerce(pol.max_dims);
  pol.k = std::max(pol.k, spec.outputs.k + 1);
  if (spec.outputs.parity) pol.k = std::max(pol.k, 2);
  return pol;
}

// ------- per-point circuit assembly -------

struct PointSetup {
  spectral::Factory factory;
  // Extras captured for overlay/observable columns at the final dimensions.
  models::FluxoniumParams atom_flux;   // fluxonium / capshunt
  models::CPBParams atom_charge;       // cpb
  models::CoupledLCParams lc;          // coupled-lc (with the row's x)
  models::ResonatorParams res;         // valid when x > 0 (or explicit e_l2)
  double x = 0.0;
  double omega_r = 0.0;  // photon frequency used by the decoupled x = 0 limit
};

PointSetup make_point(const SweepSpec& spec, double v) {
  PointSetup s;
  switch (spec.model) {
    case Model::CoupledLC: {
      s.lc = spec.lc;
      s.lc.x = axis_to_x(spec.axis, v);
      s.x = s.lc.x;
      const auto lc = s.lc;
      const auto gauge = spec.gauge;
      s.factory = [lc, gauge](const std::vector<int>& d) {
        return models::build_coupled_lc(lc, gauge, d[0], d[1]);
      };
      break;
    }
    case Model::Fluxonium: {
      s.atom_flux = spec.fluxonium;
      if (spec.axis == Axis::ThetaExt) {
        s.atom_flux.theta_ext = v;
        s.x = spec.x_fixed;
      } else {
        s.x = axis_to_x(spec.axis, v);
      }
      s.omega_r = spec.omega_r;
      if (s.x > 0.0) {
        s.res = models::resonator_from_x_flux(spec.omega_r, s.x);
        const auto atom = s.atom_flux;
        const auto res = s.res;
        s.factory = [atom, res](const std::vector<int>& d) {
          return models::build_fluxonium_photon(atom, res, d[0], d[1]);
        };
      } else {
        // x = 0 is outside the resonator map's domain but is the exact
        // decoupled limit: bare atom tensor a free photon at omega_r.
        const auto atom = s.atom_flux;
        const double wr = spec.omega_r;
        s.factory = [atom, wr](const std::vector<int>& d) {
          ops::ProductOperator po(d[0], d[1]);
          po.add_left(models::build_fluxonium_bare(atom, d[0]).h.matrix());
          po.add_right(wr * ops::fock_number(d[1]));
          return po;
        };
      }
      break;
    }
    case Model::CPB: {
      s.atom_charge = spec.cpb;
      if (spec.axis == Axis::Ng) {
        s.atom_charge.ng = v;
        if (spec.e_l2 > 0.0) {
          s.res = models::ResonatorParams{spec.e_l2, spec.e_c2};
          s.x = models::x_charge(s.atom_charge, s.res);
        } else {
          s.x = spec.x_fixed;
          s.res = models::resonator_from_x_charge(s.atom_charge.e_c1, spec.e_c2, s.x);
        }
      } else {
        s.x = axis_to_x(spec.axis, v);
        // The charge-branch map has no x = 0 image (the bare photon frequency
        // diverges); the row carries the domain error.
        s.res = models::resonator_from_x_charge(s.atom_charge.e_c1, spec.e_c2, s.x);
      }
      s.omega_r = models::cpb_omega_r(s.atom_charge, s.res);
      const auto atom = s.atom_charge;
      const auto res = s.res;
      s.factory = [atom, res](const std::vector<int>& d) {
        return models::build_cpb_photon(atom, res, d[0], d[1]);
      };
      break;
    }
    case Model::Rabi: {
      models::RabiParams rp = spec.rabi;
      s.x = axis_to_x(spec.axis, v);
      rp.g = s.x * rp.omega_r;
      s.omega_r = rp.omega_r;
      s.factory = [rp](const std::vector<int>& d) {
        return models::build_quantum_rabi(rp, d[0]);
      };
      break;
    }
    case Model::Capshunt: {
      s.atom_flux = spec.fluxonium;
      s.x = axis_to_x(spec.axis, v);
      s.omega_r = spec.omega_r;
      const auto atom = s.atom_flux;
      if (s.x > 0.0) {
        s.res = models::resonator_from_x_flux(spec.omega_r, s.x);
        const double ec2 = s.res.e_c2;
        s.factory = [atom, ec2](const std::vector<int>& d) {
          return single_factor(models::build_capshunted_fluxonium(atom, ec2, d[0]).matrix());
        };
      } else {
        // x = 0: infinite shunt capacitance, i.e. the bare atom.
        s.factory = [atom](const std::vector<int>& d) {
          return single_factor(models::build_fluxonium_bare(atom, d[0]).h.matrix());
        };
      }
      break;
    }
  }
  return s;
}

void push_transitions(SweepRow& row, const RealVector& energies, int k) {
  for (int i = 1; i <= k; ++i) row.values.push_back(energies(i) - energies(0));
}

SweepRow evaluate_point(const SweepSpec& spec, const spectral::TruncationPolicy& pol,
                        double v) {
  SweepRow row;
  row.axis = v;
  const PointSetup setup = make_point(spec, v);

  spectral::SpectralResult r = spectral::converge_truncation(setup.factory, pol);
  const std::vector<int> dims = r.basis_dims;
  row.converged = r.converged;
  if (!r.converged) row.error = "truncation not converged at dims " + dims_string(dims);

  // Parity columns need degenerate doublets rotated onto parity eigenstates,
  // which requires the operator at the final (now known) dimensions.
  Matrix parity_op;
  if (spec.outputs.parity) {
    parity_op = (spec.model == Model::Rabi)
                    ? models::rabi_parity(dims[0])
                    : models::coupled_mode_parity(dims[0], dims[1]);
    spectral::EigensolveOptions opts = pol.solver;
    opts.parity = &parity_op;
    const bool conv = r.converged;
    auto history = std::move(r.history);
    r = spectral::eigensolve(setup.factory(dims), pol.k, opts);
    r.converged = conv;
    r.history = std::move(history);
    r.basis_dims = dims;
  }

  const auto [dim_atom, dim_photon] = factor_dims(spec.model, dims);
  const int k = spec.outputs.k;
  push_transitions(row, r.eigenvalues, k);

  if (spec.model == Model::CoupledLC) {
    const auto [hi_exact, lo_exact] = models::normal_modes_exact(setup.lc);
    // The higher single-excitation state sits above floor(hi/lo) lower-mode
    // levels, so the numeric extraction needs that many eigenpairs plus slack.
    int k_modes = static_cast<int>(hi_exact / lo_exact) + 4;
    k_modes = std::min<int>(k_modes, static_cast<int>(dim_atom * dim_photon));
    const auto [hi_num, lo_num] =
        models::coupled_lc_normal_modes(setup.lc, spec.gauge, dims[0], dims[1], k_modes);
    row.values.insert(row.values.end(), {hi_num, lo_num, hi_exact, lo_exact});
  }

  if (spec.outputs.levels)
    for (int i = 0; i <= k; ++i) row.values.push_back(r.eigenvalues(i));

  if (spec.outputs.photon_number) {
    const Vector ground = r.eigenvectors.col(0);
    row.values.push_back(obs::photon_number(ground, dim_atom, dim_photon));
  }

  if (spec.outputs.entanglement) {
    const Vector ground = r.eigenvectors.col(0);
    const RealVector p =
        obs::entanglement_spectrum(ground, dim_atom, dim_photon, obs::Factor::Photon);
    const double p1 = p.size() > 0 ? p(0) : 1.0;
    const double p2 = p.size() > 1 ? p(1) : 0.0;
    row.values.insert(row.values.end(), {p1, p2, std::max(p.sum() - p1 - p2, 0.0)});
  }

  if (spec.outputs.parity) {
    const Vector s0 = r.eigenvectors.col(0);
    const Vector s1 = r.eigenvectors.col(1);
    row.values.push_back(obs::parity_expectation(s0, parity_op));
    row.values.push_back(obs::parity_expectation(s1, parity_op));
  }

  if (spec.outputs.rabi_overlay) {
    models::RabiParams rp;
    if (setup.x > 0.0) {
      rp = (spec.model == Model::CPB)
               ? models::truncate_to_rabi(setup.atom_charge, setup.res, dims[0])
               : models::truncate_to_rabi(setup.atom_flux, setup.res, dims[0]);
    } else {
      // Decoupled limit: two bare atom levels and a free photon.
      const auto bare = models::build_fluxonium_bare(setup.atom_flux, dims[0]);
      const auto br = spectral::eigensolve(bare.h, 2, pol.solver);
      rp = models::RabiParams{setup.omega_r, br.eigenvalues(1) - br.eigenvalues(0), 0.0};
    }
    const int n_photon = (spec.model == Model::Rabi) ? dims[0] : dims[1];
    const auto rr =
        spectral::eigensolve(models::build_quantum_rabi(rp, n_photon), pol.k, pol.solver);
    push_transitions(row, rr.eigenvalues, k);
  }

  if (spec.outputs.capshunt_overlay) {
    const HermitianOperator h =
        setup.x > 0.0
            ? models::build_capshunted_fluxonium(setup.atom_flux, setup.res.e_c2, dims[0])
            : models::build_fluxonium_bare(setup.atom_flux, dims[0]).h;
    const auto cr = spectral::eigensolve(h, pol.k, pol.solver);
    push_transitions(row, cr.eigenvalues, k);
  }

  return row;
}

}  // namespace

// ------- spec validation -------

void SweepSpec::validate() const {
  if (points < 2) throw DomainError("sweep: points must be at least 2");
  if (!std::isfinite(from) || !std::isfinite(to))
    throw DomainError("sweep: axis range must be finite");
  if (outputs.k < 1) throw DomainError("sweep: outputs.k must be at least 1");

  const double lo = std::min(from, to);
  switch (axis) {
    case Axis::X:
    case Axis::XSquared:
      if (lo < 0.0) throw DomainError("sweep: coupling axis range must be nonnegative");
      break;
    case Axis::ThetaExt:
      if (model != Model::Fluxonium)
        throw DomainError("sweep: theta_ext axis applies to the fluxonium model only");
      break;
    case Axis::Ng:
      if (model != Model::CPB)
        throw DomainError("sweep: ng axis applies to the cpb model only");
      if (lo < -1.0 || std::max(from, to) > 1.0)
        throw DomainError("sweep: ng range must lie within [-1, 1]");
      break;
  }

  switch (model) {
    case Model::CoupledLC: {
      models::CoupledLCParams p = lc;
      p.x = 0.0;  // the axis supplies x
      p.validate();
      if (!coupling_axis(axis))
        throw DomainError("sweep: coupled-lc sweeps run over x or x_squared");
      break;
    }
    case Model::Fluxonium:
      fluxonium.validate();
      if (omega_r <= 0.0) throw DomainError("sweep: fluxonium sweeps need omega_r > 0");
      if (axis == Axis::ThetaExt && x_fixed < 0.0)
        throw DomainError("sweep: x_fixed must be nonnegative");
      break;
    case Model::CPB: {
      cpb.validate();
      if (e_c2 <= 0.0) throw DomainError("sweep: cpb sweeps need e_c2 > 0");
      if (axis == Axis::Ng) {
        if (e_l2 < 0.0) throw DomainError("sweep: e_l2 must be nonnegative");
        if (e_l2 == 0.0 && x_fixed <= 0.0)
          throw DomainError("sweep: cpb ng sweeps need e_l2 > 0 or x_fixed > 0");
      } else if (!coupling_axis(axis)) {
        throw DomainError("sweep: cpb sweeps run over ng, x or x_squared");
      }
      break;
    }
    case Model::Rabi:
      if (rabi.omega_r <= 0.0) throw DomainError("sweep: rabi sweeps need omega_r > 0");
      if (rabi.omega_a < 0.0) throw DomainError("sweep: omega_a must be nonnegative");
      if (!coupling_axis(axis))
        throw DomainError("sweep: rabi sweeps run over x or x_squared");
      break;
    case Model::Capshunt:
      fluxonium.validate();
      if (omega_r <= 0.0) throw DomainError("sweep: capshunt sweeps need omega_r > 0");
      if (!coupling_axis(axis))
        throw DomainError("sweep: capshunt sweeps run over x or x_squared");
      break;
  }

  if (outputs.parity && (model == Model::CPB || model == Model::Capshunt))
    throw DomainError("sweep: parity columns are not defined for this model");
  if ((outputs.photon_number || outputs.entanglement) && model == Model::Capshunt)
    throw DomainError("sweep: capshunt has a single mode; no photon columns");
  if (outputs.rabi_overlay) {
    if (!(model == Model::Fluxonium || model == Model::CPB) || !coupling_axis(axis))
      throw DomainError(
          "sweep: rabi overlay needs a fluxonium or cpb coupling-axis sweep");
    if (model == Model::CPB && std::abs(std::abs(cpb.ng) - 0.5) > kHalfChargePointTol)
      throw DomainError("sweep: rabi overlay needs the cpb sweep pinned at |ng| = 1/2");
    if (model == Model::Fluxonium &&
        std::abs(fluxonium.theta_ext - kPi) > kHalfChargePointTol)
      throw DomainError(
          "sweep: rabi overlay needs the fluxonium sweep pinned at theta_ext = pi");
  }
  if (outputs.capshunt_overlay && model != Model::Fluxonium)
    throw DomainError("sweep: capshunt overlay applies to fluxonium sweeps only");
}

// ------- sweep driver -------

SweepTable run_sweep(const SweepSpec& spec) {
  spec.validate();
  const spectral::TruncationPolicy pol = adapt_policy(spec);

  SweepTable table;
  table.axis_name = axis_name(spec.axis);
  table.columns = make_columns(spec);
  table.provenance = make_provenance(spec);

  auto error_row = [&](double v, const std::string& message) {
    SweepRow row;
    row.axis = v;
    row.values.assign(table.columns.size(), kNaN);
    row.error = message;
    row.converged = false;
    return row;
  };

  for (int i = 0; i < spec.points; ++i) {
    const double v = axis_value(spec.from, spec.to, spec.points, i);
    try {
      table.rows.push_back(evaluate_point(spec, pol, v));
    } catch (const ResourceError& e) {
      // Resource exhaustion will not heal at later points: record it, mark
      // the remaining points aborted, and return the partial table.
      table.rows.push_back(error_row(v, e.what()));
      for (int j = i + 1; j < spec.points; ++j)
        table.rows.push_back(error_row(axis_value(spec.from, spec.to, spec.points, j),
                                       "aborted after resource error"));
      break;
    } catch (const std::exception& e) {
      table.rows.push_back(error_row(v, e.what()));
    }
  }

  for (const SweepRow& row : table.rows)
    if (!row.error.empty() || !row.converged) table.all_converged = false;
  return table;
}

spectral::SpectralResult converge_point(const SweepSpec& spec, double axis_value) {
  SweepSpec one = spec;
  one.from = one.to = axis_value;
  one.points = 2;
  one.validate();
  const spectral::TruncationPolicy pol = adapt_policy(one);
  return spectral::converge_truncation(make_point(one, axis_value).factory, pol);
}

// ------- renormalized-fluxonium fit -------

namespace {

struct FitTarget {
  std::vector<double> theta;                 // usable flux points
  std::vector<std::vector<double>> values;   // [point][transition]
};

FitTarget extract_target(const SweepTable& target, int n_transitions) {
  if (n_transitions < 1) throw DomainError("fit: n_transitions must be at least 1");
  if (target.axis_name != "theta_ext")
    throw ContractError("fit: target table must sweep theta_ext");

  std::vector<std::size_t> idx;
  for (int t = 1; t <= n_transitions; ++t) {
    const std::string name = "w0" + std::to_string(t);
    const auto it = std::find(target.columns.begin(), target.columns.end(), name);
    if (it == target.columns.end())
      throw ContractError("fit: target table lacks column " + name);
    idx.push_back(static_cast<std::size_t>(it - target.columns.begin()));
  }

  FitTarget out;
  for (const SweepRow& row : target.rows) {
    if (!row.error.empty()) continue;
    std::vector<double> vals;
    bool ok = true;
    for (const std::size_t j : idx) {
      if (j >= row.values.size() || !std::isfinite(row.values[j])) {
        ok = false;
        break;
      }
      vals.push_back(row.values[j]);
    }
    if (!ok) continue;
    out.theta.push_back(row.axis);
    out.values.push_back(std::move(vals));
  }
  if (out.theta.size() < 10)
    throw ContractError("fit: need at least 10 usable flux points, have " +
                        std::to_string(out.theta.size()));
  return out;
}

// Classic Nelder-Mead on n parameters. Deterministic; returns best vertex.
struct SimplexOutcome {
  std::vector<double> best;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

SimplexOutcome nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                           const std::vector<double>& start, int max_iterations,
                           double tol) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> x(n + 1, start);
  std::vector<double> fx(n + 1);
  for (std::size_t i = 0; i < n; ++i)
    x[i + 1][i] += (start[i] != 0.0) ? 0.05 * start[i] : 0.05;
  for (std::size_t i = 0; i <= n; ++i) fx[i] = f(x[i]);

  auto order = [&] {
    std::vector<std::size_t> p(n + 1);
    for (std::size_t i = 0; i <= n; ++i) p[i] = i;
    std::sort(p.begin(), p.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
    std::vector<std::vector<double>> xs(n + 1);
    std::vector<double> fs(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      xs[i] = x[p[i]];
      fs[i] = fx[p[i]];
    }
    x = std::move(xs);
    fx = std::move(fs);
  };

  SimplexOutcome out;
  int it = 0;
  for (; it < max_iterations; ++it) {
    order();
    if (fx[n] - fx[0] < tol) {
      out.converged = true;
      break;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += x[i][j] / static_cast<double>(n);

    auto blend = [&](double c) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + c * (x[n][j] - centroid[j]);
      return p;
    };

    const std::vector<double> xr = blend(-1.0);  // reflection
    const double fr = f(xr);
    if (fr < fx[0]) {
      const std::vector<double> xe = blend(-2.0);  // expansion
      const double fe = f(xe);
      if (fe < fr) {
        x[n] = xe;
        fx[n] = fe;
      } else {
        x[n] = xr;
        fx[n] = fr;
      }
    } else if (fr < fx[n - 1]) {
      x[n] = xr;
      fx[n] = fr;
    } else {
      const std::vector<double> xc = blend(fr < fx[n] ? -0.5 : 0.5);  // contraction
      const double fc = f(xc);
      if (fc < std::min(fr, fx[n])) {
        x[n] = xc;
        fx[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {  // shrink toward the best vertex
          for (std::size_t j = 0; j < n; ++j) x[i][j] = x[0][j] + 0.5 * (x[i][j] - x[0][j]);
          fx[i] = f(x[i]);
        }
      }
    }
  }
  order();
  out.best = x[0];
  out.value = fx[0];
  out.iterations = it;
  return out;
}

}  // namespace

RenormalizedFitResult fit_renormalized_fluxonium(const SweepTable& target, int n_transitions,
                                                 const models::FluxoniumParams& init,
                                                 const FitOptions& opts) {
  if (opts.n_levels < 8) throw DomainError("fit: n_levels must be at least 8");
  if (opts.max_iterations < 1) throw DomainError("fit: max_iterations must be positive");
  if (opts.restarts < 0) throw DomainError("fit: restarts must be nonnegative");
  if (opts.tol <= 0.0) throw DomainError("fit: tol must be positive");
  init.validate();

  const FitTarget data = extract_target(target, n_transitions);
  const int k = n_transitions + 1;

  // RMS misfit of the bare-atom transition curves against the target columns.
  // Non-positive parameter excursions are barrier-penalized so the simplex
  // retreats into the physical octant instead of evaluating a broken model.
  const auto objective = [&](const std::vector<double>& q) -> double {
    constexpr double kFloor = 1e-9;
    double breach = 0.0;
    for (const double qi : q)
      if (qi < kFloor) breach += kFloor - qi;
    if (breach > 0.0) return 1e6 * (1.0 + breach);

    models::FluxoniumParams p{q[0], q[1], q[2], 0.0};
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < data.theta.size(); ++i) {
      p.theta_ext = data.theta[i];
      const auto r =
          spectral::eigensolve(models::build_fluxonium_bare(p, opts.n_levels).h, k);
      for (int t = 1; t <= n_transitions; ++t) {
        const double d = (r.eigenvalues(t) - r.eigenvalues(0)) - data.values[i][t - 1];
        sum += d * d;
        ++count;
      }
    }
    return std::sqrt(sum / static_cast<double>(count));
  };

  RenormalizedFitResult result;
  result.residual_init = objective({init.e_j, init.e_c1, init.e_l1});

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> jitter(-0.2, 0.2);

  result.residual = std::numeric_limits<double>::infinity();
  result.converged = false;
  for (int s = 0; s <= opts.restarts; ++s) {
    std::vector<double> start{init.e_j, init.e_c1, init.e_l1};
    if (s > 0)
      for (double& q : start) q *= 1.0 + jitter(rng);
    const SimplexOutcome run = nelder_mead(objective, start, opts.max_iterations, opts.tol);
    result.iterations += run.iterations;
    result.converged = result.converged || run.converged;
    if (run.value < result.residual) {
      result.residual = run.value;
      result.e_j_star = run.best[0];
      result.e_c_star = run.best[1];
      result.e_l_star = run.best[2];
    }
  }
  // Start 0 begins at init and the simplex never discards its best vertex.
  result.residual = std::min(result.residual, result.residual_init);
  return result;
}

}  // namespace uscqed::sweep
