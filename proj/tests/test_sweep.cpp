// Sweep-driver checks: the deep-coupling polaron slope of the two-level
// model, determinism and range-reversal symmetry of tables, the exact
// decoupled limit at zero coupling, in-row error capture, axis/model
// consistency guards, and synthetic-parameter recovery by the fit.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "uscqed/models.hpp"
#include "uscqed/spectral.hpp"
#include "uscqed/sweep.hpp"

using namespace uscqed;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t column_index(const sweep::SweepTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == name) return i;
  FAIL("missing column ", name);
  return 0;
}

double cell(const sweep::SweepTable& t, std::size_t row, const std::string& name) {
  return t.rows[row].values[column_index(t, name)];
}

// Structural invariant: every row has exactly one value per declared column.
void check_shape(const sweep::SweepTable& t, int points) {
  REQUIRE(t.rows.size() == static_cast<std::size_t>(points));
  for (const auto& row : t.rows) REQUIRE(row.values.size() == t.columns.size());
}

sweep::SweepSpec rabi_spec() {
  sweep::SweepSpec spec;
  spec.model = sweep::Model::Rabi;
  spec.axis = sweep::Axis::X;
  spec.from = 0.0;
  spec.to = 3.0;
  spec.points = 20;
  spec.rabi = models::RabiParams{1.0, 1.0, 0.0};  // g is set from the axis
  spec.policy.start_dims = {60};
  spec.policy.max_dims = {160};
  spec.policy.step = 20;
  spec.policy.tol = 1e-10;
  spec.outputs.k = 1;
  spec.outputs.photon_number = true;
  spec.outputs.parity = true;
  return spec;
}

}  // namespace

TEST_CASE("rabi sweep: polaron slope, photon number, parity columns") {
  const sweep::SweepSpec spec = rabi_spec();
  const sweep::SweepTable t = sweep::run_sweep(spec);
  check_shape(t, spec.points);
  CHECK(t.all_converged);
  CHECK(t.axis_name == "x");

  // Deep coupling: the lowest splitting is omega_a exp(-2 x^2) up to slowly
  // varying prefactors, so ln w01 against x^2 has slope -2 asymptotically.
  const double w_last = cell(t, 19, "w01");
  const double w_prev = cell(t, 18, "w01");
  const double x_last = t.rows[19].axis;
  const double x_prev = t.rows[18].axis;
  const double slope =
      (std::log(w_last) - std::log(w_prev)) / (x_last * x_last - x_prev * x_prev);
  CHECK(slope == Approx(-2.0).epsilon(0.2));

  // The ground state is a displaced pair: <a'a> = (g/omega_r)^2 = x^2.
  CHECK(cell(t, 19, "photon_number") == Approx(9.0).epsilon(0.1));
  CHECK(std::abs(cell(t, 0, "photon_number")) < 1e-10);

  // Parity is conserved at every coupling; the lowest doublet members carry
  // opposite signs once the splitting opens (x > 0).
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    CHECK(std::abs(cell(t, i, "parity0")) > 1.0 - 1e-4);
    CHECK(std::abs(cell(t, i, "parity1")) > 1.0 - 1e-4);
  }
  CHECK(cell(t, 19, "parity0") * cell(t, 19, "parity1") < 0.0);
}

TEST_CASE("sweep determinism, range reversal, and the x_squared axis") {
  sweep::SweepSpec spec = rabi_spec();
  spec.points = 5;
  spec.from = 0.5;
  spec.to = 2.5;

  const sweep::SweepTable a = sweep::run_sweep(spec);
  const sweep::SweepTable b = sweep::run_sweep(spec);
  check_shape(a, spec.points);
  REQUIRE(a.columns == b.columns);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].axis == b.rows[i].axis);  // bitwise
    for (std::size_t j = 0; j < a.columns.size(); ++j)
      CHECK(a.rows[i].values[j] == b.rows[i].values[j]);  // bitwise
  }
  CHECK(a.provenance == b.provenance);

  // Reversing the range reverses the rows and changes nothing else.
  sweep::SweepSpec rev = spec;
  std::swap(rev.from, rev.to);
  const sweep::SweepTable c = sweep::run_sweep(rev);
  REQUIRE(c.rows.size() == a.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& fwd = a.rows[i];
    const auto& bwd = c.rows[a.rows.size() - 1 - i];
    CHECK(fwd.axis == bwd.axis);  // bitwise
    for (std::size_t j = 0; j < a.columns.size(); ++j)
      CHECK(fwd.values[j] == bwd.values[j]);  // bitwise
  }

  // The x_squared axis is the same sweep through a reparametrized grid.
  sweep::SweepSpec sq = rabi_spec();
  sq.points = 2;
  sq.from = 1.0;
  sq.to = 3.0;
  const sweep::SweepTable lin = sweep::run_sweep(sq);
  sq.axis = sweep::Axis::XSquared;
  sq.from = 1.0;
  sq.to = 9.0;
  const sweep::SweepTable quad = sweep::run_sweep(sq);
  CHECK(quad.axis_name == "x_squared");
  for (std::size_t j = 0; j < lin.columns.size(); ++j) {
    CHECK(quad.rows[0].values[j] == Approx(lin.rows[0].values[j]).epsilon(1e-12));
    CHECK(quad.rows[1].values[j] == Approx(lin.rows[1].values[j]).epsilon(1e-12));
  }
}

TEST_CASE("fluxonium sweep at x = 0 is the exact decoupled limit") {
  sweep::SweepSpec spec;
  spec.model = sweep::Model::Fluxonium;
  spec.axis = sweep::Axis::X;
  spec.from = 0.0;
  spec.to = 0.5;
  spec.points = 2;
  spec.fluxonium = models::FluxoniumParams{5.0, 5.0, 0.5, kPi};
  spec.omega_r = 2.47;
  spec.policy.start_dims = {30, 16};
  spec.policy.max_dims = {60, 40};
  spec.policy.step = 8;
  spec.policy.tol = 1e-6;
  spec.outputs.k = 2;
  spec.outputs.photon_number = true;
  spec.outputs.entanglement = true;
  spec.outputs.parity = true;

  const sweep::SweepTable t = sweep::run_sweep(spec);
  check_shape(t, 2);
  REQUIRE(t.all_converged);
  CHECK(t.rows[0].axis == 0.0);
  CHECK(t.rows[1].axis == 0.5);

  // x = 0: bare atom tensor a free photon. The atom splitting at half flux is
  // 2.478 GHz, just above omega_r, so the first excitation is the photon line
  // at exactly omega_r, the ground state holds no photons and is a sharp
  // product (p1 = 1), with even-even / even-odd reflection parities.
  CHECK(cell(t, 0, "w01") == Approx(2.47).epsilon(1e-10));
  CHECK(std::abs(cell(t, 0, "photon_number")) < 1e-10);
  CHECK(std::abs(cell(t, 0, "p1") - 1.0) < 1e-10);
  CHECK(std::abs(cell(t, 0, "p_tail")) < 1e-10);
  CHECK(std::abs(cell(t, 0, "parity0") - 1.0) < 1e-8);
  CHECK(std::abs(cell(t, 0, "parity1") + 1.0) < 1e-8);

  // x = 0.5: hybridized; the ground state carries photons and entanglement.
  CHECK(cell(t, 1, "photon_number") > 0.01);
  CHECK(cell(t, 1, "p1") < 1.0 - 1e-4);
  CHECK(std::abs(cell(t, 1, "parity0")) > 1.0 - 1e-6);
}

TEST_CASE("per-point failures are recorded in-row, never dropped") {
  sweep::SweepSpec spec;
  spec.model = sweep::Model::CPB;
  spec.axis = sweep::Axis::X;
  spec.from = 0.0;  // x = 0 has no charge-branch resonator image
  spec.to = 1.0;
  spec.points = 3;
  spec.cpb = models::CPBParams{2.0, 10.0, 0.5};
  spec.e_c2 = 1.0;
  spec.policy.k = 3;  // converge only the read-out levels
  spec.policy.start_dims = {8, 24};
  spec.policy.max_dims = {16, 120};
  spec.policy.step = 12;
  spec.outputs.k = 2;
  spec.outputs.photon_number = true;

  const sweep::SweepTable t = sweep::run_sweep(spec);
  check_shape(t, 3);
  CHECK_FALSE(t.all_converged);

  CHECK_FALSE(t.rows[0].error.empty());
  CHECK_FALSE(t.rows[0].converged);
  for (const double v : t.rows[0].values) CHECK(std::isnan(v));

  for (std::size_t i : {std::size_t{1}, std::size_t{2}}) {
    CHECK(t.rows[i].error.empty());
    CHECK(t.rows[i].converged);
    CHECK(cell(t, i, "w01") > 0.0);
    CHECK(std::isfinite(cell(t, i, "photon_number")));
  }
}

TEST_CASE("axis/model consistency guards") {
  sweep::SweepSpec spec = rabi_spec();

  spec.points = 1;
  CHECK_THROWS_AS(sweep::run_sweep(spec), DomainError);
  spec.points = 5;

  spec.axis = sweep::Axis::ThetaExt;  // theta_ext is a fluxonium axis
  CHECK_THROWS_AS(sweep::run_sweep(spec), DomainError);
  spec.axis = sweep::Axis::Ng;  // ng is a cpb axis
  CHECK_THROWS_AS(sweep::run_sweep(spec), DomainError);

  spec.axis = sweep::Axis::X;
  spec.from = -0.5;  // couplings are nonnegative
  CHECK_THROWS_AS(sweep::run_sweep(spec), DomainError);
  spec.from = 0.0;

  spec.outputs.rabi_overlay = true;  // the overlay is its own model here
  CHECK_THROWS_AS(sweep::run_sweep(spec), DomainError);
  spec.outputs.rabi_overlay = false;

  sweep::SweepSpec fl;
  fl.model = sweep::Model::Fluxonium;
  fl.fluxonium = models::FluxoniumParams{5.0, 5.0, 0.5, kPi};
  fl.omega_r = 0.0;  // flux-branch sweeps need the resonator pivot
  CHECK_THROWS_AS(sweep::run_sweep(fl), DomainError);

  sweep::SweepSpec ng;
  ng.model = sweep::Model::CPB;
  ng.axis = sweep::Axis::Ng;
  ng.cpb = models::CPBParams{2.0, 10.0, 0.0};
  ng.e_c2 = 1.0;
  ng.e_l2 = 0.25;
  ng.from = -1.5;  // offset charge lives in [-1, 1]
  ng.to = 0.0;
  ng.points = 3;
  CHECK_THROWS_AS(sweep::run_sweep(ng), DomainError);

  sweep::SweepSpec cs;
  cs.model = sweep::Model::Capshunt;
  cs.fluxonium = models::FluxoniumParams{5.0, 5.0, 0.5, kPi};
  cs.omega_r = 2.47;
  cs.from = 0.0;
  cs.to = 2.0;
  cs.points = 3;
  cs.outputs.photon_number = true;  // single mode: no photon columns
  CHECK_THROWS_AS(sweep::run_sweep(cs), DomainError);
}

TEST_CASE("fit recovers synthetic bare-atom parameters") {
  // Hand-built target: bare transition curves over 11 flux points around half
  // flux, from the same spectral pipeline the fit uses internally.
  const models::FluxoniumParams truth{5.0, 5.0, 0.5, 0.0};
  const int n_levels = 60;

  sweep::SweepTable target;
  target.axis_name = "theta_ext";
  target.columns = {"w01", "w02", "w03"};
  for (int i = 0; i < 11; ++i) {
    models::FluxoniumParams p = truth;
    p.theta_ext = 0.9 * kPi + 0.2 * kPi * i / 10.0;
    const auto r = spectral::eigensolve(models::build_fluxonium_bare(p, n_levels).h, 4);
    sweep::SweepRow row;
    row.axis = p.theta_ext;
    for (int t = 1; t <= 3; ++t) row.values.push_back(r.eigenvalues(t) - r.eigenvalues(0));
    target.rows.push_back(row);
  }

  sweep::FitOptions opts;
  opts.n_levels = n_levels;
  const models::FluxoniumParams init{5.5, 4.6, 0.55, 0.0};
  const auto fit = sweep::fit_renormalized_fluxonium(target, 3, init, opts);

  CHECK(fit.converged);
  CHECK(fit.residual < 1e-8);
  CHECK(fit.residual <= fit.residual_init);
  CHECK(fit.residual_init > 0.1);  // the perturbed start is far off
  CHECK(std::abs(fit.e_j_star - truth.e_j) < 1e-6);
  CHECK(std::abs(fit.e_c_star - truth.e_c1) < 1e-6);
  CHECK(std::abs(fit.e_l_star - truth.e_l1) < 1e-6);
  CHECK(fit.e_j_star > 0.0);
  CHECK(fit.e_c_star > 0.0);
  CHECK(fit.e_l_star > 0.0);
  CHECK(fit.iterations > 0);
}

TEST_CASE("fit input guards") {
  sweep::SweepTable bad;
  bad.axis_name = "x";  // not a flux sweep
  const models::FluxoniumParams init{5.0, 5.0, 0.5, 0.0};
  CHECK_THROWS_AS(sweep::fit_renormalized_fluxonium(bad, 1, init), ContractError);

  sweep::SweepTable few;
  few.axis_name = "theta_ext";
  few.columns = {"w01"};
  for (int i = 0; i < 5; ++i) {
    sweep::SweepRow row;
    row.axis = kPi + 0.01 * i;
    row.values = {2.5};
    few.rows.push_back(row);
  }
  CHECK_THROWS_AS(sweep::fit_renormalized_fluxonium(few, 1, init), ContractError);

  sweep::SweepTable narrow;
  narrow.axis_name = "theta_ext";
  narrow.columns = {"w01", "w02"};
  for (int i = 0; i < 12; ++i) {
    sweep::SweepRow row;
    row.axis = kPi + 0.01 * i;
    row.values = {2.5, 7.0};
    narrow.rows.push_back(row);
  }
  CHECK_THROWS_AS(sweep::fit_renormalized_fluxonium(narrow, 3, init), ContractError);
  CHECK_THROWS_AS(sweep::fit_renormalized_fluxonium(narrow, 0, init), DomainError);
}
