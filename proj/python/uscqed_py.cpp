// Python bindings over the circuit-model library: Hamiltonian builders,
// eigensolves with truncation control, ground-state observables, parameter
// sweeps, and the renormalized-parameter fit. Matrices cross the boundary as
// numpy arrays; std exceptions map to the usual Python ones.
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uscqed/io.hpp"
#include "uscqed/models.hpp"
#include "uscqed/observables.hpp"
#include "uscqed/operators.hpp"
#include "uscqed/spectral.hpp"
#include "uscqed/sweep.hpp"
#include "uscqed/types.hpp"

namespace py = pybind11;
using namespace uscqed;

namespace {

// The C++ parity hook is a non-owning pointer inside the options struct; in
// Python the matrix is passed per call instead.
spectral::SpectralResult eigensolve_parity(const ops::ProductOperator& h, int k,
                                           const Matrix& parity,
                                           spectral::EigensolveOptions opts) {
  opts.parity = &parity;
  return spectral::eigensolve(h, k, opts);
}

}  // namespace

PYBIND11_MODULE(_uscqed, m) {
  m.doc() = "circuit models of an atom ultrastrongly coupled to a photon mode";
  m.attr("__version__") = kVersion;

  // ------- operators -------

  py::class_<HermitianOperator>(m, "HermitianOperator")
      .def(py::init<Matrix>(), py::arg("matrix"))
      .def_property_readonly("dim", &HermitianOperator::dim)
      .def_property_readonly("matrix",
                             [](const HermitianOperator& h) -> Matrix { return h.matrix(); });

  py::class_<ops::ProductOperator>(m, "ProductOperator")
      .def(py::init<Eigen::Index, Eigen::Index>(), py::arg("dim_left"), py::arg("dim_right"))
      .def("add", &ops::ProductOperator::add, py::arg("left"), py::arg("right"))
      .def("add_left", &ops::ProductOperator::add_left, py::arg("left"))
      .def("add_right", &ops::ProductOperator::add_right, py::arg("right"))
      .def_property_readonly("dim_left", &ops::ProductOperator::dim_left)
      .def_property_readonly("dim_right", &ops::ProductOperator::dim_right)
      .def_property_readonly("dim", &ops::ProductOperator::dim)
      .def("dense", &ops::ProductOperator::dense)
      .def("apply", [](const ops::ProductOperator& h, const Vector& v) {
        Vector out;
        h.apply(v, out);
        return out;
      });

  m.def("fock_ladder", &ops::fock_ladder, py::arg("n_levels"));
  m.def("fock_number", &ops::fock_number, py::arg("n_levels"));
  m.def("fock_parity", &ops::fock_parity, py::arg("n_levels"));
  m.def("max_tensor_dim", &ops::max_tensor_dim);

  // ------- model parameters -------

  py::enum_<models::Gauge>(m, "Gauge")
      .value("Flux", models::Gauge::Flux)
      .value("Charge", models::Gauge::Charge);

  py::class_<models::CoupledLCParams>(m, "CoupledLCParams")
      .def(py::init([](double omega1, double omega2, double x) {
             return models::CoupledLCParams{omega1, omega2, x};
           }),
           py::arg("omega1") = 1.0, py::arg("omega2") = 1.0, py::arg("x") = 0.0)
      .def_readwrite("omega1", &models::CoupledLCParams::omega1)
      .def_readwrite("omega2", &models::CoupledLCParams::omega2)
      .def_readwrite("x", &models::CoupledLCParams::x);

  py::class_<models::FluxoniumParams>(m, "FluxoniumParams")
      .def(py::init([](double e_j, double e_c1, double e_l1, double theta_ext) {
             return models::FluxoniumParams{e_j, e_c1, e_l1, theta_ext};
           }),
           py::arg("e_j") = 0.0, py::arg("e_c1") = 0.0, py::arg("e_l1") = 0.0,
           py::arg("theta_ext") = 0.0)
      .def_readwrite("e_j", &models::FluxoniumParams::e_j)
      .def_readwrite("e_c1", &models::FluxoniumParams::e_c1)
      .def_readwrite("e_l1", &models::FluxoniumParams::e_l1)
      .def_readwrite("theta_ext", &models::FluxoniumParams::theta_ext);

  py::class_<models::CPBParams>(m, "CPBParams")
      .def(py::init([](double e_j, double e_c1, double ng) {
             return models::CPBParams{e_j, e_c1, ng};
           }),
           py::arg("e_j") = 0.0, py::arg("e_c1") = 0.0, py::arg("ng") = 0.0)
      .def_readwrite("e_j", &models::CPBParams::e_j)
      .def_readwrite("e_c1", &models::CPBParams::e_c1)
      .def_readwrite("ng", &models::CPBParams::ng);

  py::class_<models::ResonatorParams>(m, "ResonatorParams")
      .def(py::init([](double e_l2, double e_c2) {
             return models::ResonatorParams{e_l2, e_c2};
           }),
           py::arg("e_l2") = 0.0, py::arg("e_c2") = 0.0)
      .def_readwrite("e_l2", &models::ResonatorParams::e_l2)
      .def_readwrite("e_c2", &models::ResonatorParams::e_c2)
      .def_property_readonly("omega_r", &models::ResonatorParams::omega_r);

  py::class_<models::RabiParams>(m, "RabiParams")
      .def(py::init([](double omega_r, double omega_a, double g) {
             return models::RabiParams{omega_r, omega_a, g};
           }),
           py::arg("omega_r") = 0.0, py::arg("omega_a") = 0.0, py::arg("g") = 0.0)
      .def_readwrite("omega_r", &models::RabiParams::omega_r)
      .def_readwrite("omega_a", &models::RabiParams::omega_a)
      .def_readwrite("g", &models::RabiParams::g);

  // ------- Hamiltonian builders -------

  m.def("build_coupled_lc", &models::build_coupled_lc, py::arg("params"), py::arg("gauge"),
        py::arg("n1"), py::arg("n2"));
  m.def("normal_modes_analytic", &models::normal_modes_analytic, py::arg("omega0"),
        py::arg("x"));
  m.def("normal_modes_exact", &models::normal_modes_exact, py::arg("params"));
  m.def("coupled_lc_normal_modes", &models::coupled_lc_normal_modes, py::arg("params"),
        py::arg("gauge"), py::arg("n1"), py::arg("n2"), py::arg("k"));

  py::class_<models::FluxoniumBare>(m, "FluxoniumBare")
      .def_readonly("h", &models::FluxoniumBare::h)
      .def_readonly("theta", &models::FluxoniumBare::theta);
  m.def("build_fluxonium_bare", &models::build_fluxonium_bare, py::arg("params"),
        py::arg("n_levels"));
  m.def("build_fluxonium_photon", &models::build_fluxonium_photon, py::arg("atom"),
        py::arg("resonator"), py::arg("n1"), py::arg("n2"));
  m.def("build_capshunted_fluxonium", &models::build_capshunted_fluxonium, py::arg("params"),
        py::arg("e_c2"), py::arg("n_levels"));

  py::class_<models::CPBBare>(m, "CPBBare")
      .def_readonly("h", &models::CPBBare::h)
      .def_readonly("n_op", &models::CPBBare::n_op);
  m.def("build_cpb_bare", &models::build_cpb_bare, py::arg("params"), py::arg("n_cut"));
  m.def("build_cpb_photon", &models::build_cpb_photon, py::arg("atom"), py::arg("resonator"),
        py::arg("n_cut"), py::arg("n2"));
  m.def("build_cpb_photon_regrouped", &models::build_cpb_photon_regrouped, py::arg("atom"),
        py::arg("resonator"), py::arg("n_cut"), py::arg("n2"));

  m.def("build_quantum_rabi", &models::build_quantum_rabi, py::arg("params"),
        py::arg("n_photon"));
  m.def("truncate_to_rabi",
        py::overload_cast<const models::FluxoniumParams&, const models::ResonatorParams&, int>(
            &models::truncate_to_rabi),
        py::arg("atom"), py::arg("resonator"), py::arg("n_levels"));
  m.def("truncate_to_rabi",
        py::overload_cast<const models::CPBParams&, const models::ResonatorParams&, int>(
            &models::truncate_to_rabi),
        py::arg("atom"), py::arg("resonator"), py::arg("n_cut"));

  m.def("x_flux", &models::x_flux, py::arg("resonator"));
  m.def("x_charge", &models::x_charge, py::arg("atom"), py::arg("resonator"));
  m.def("cpb_omega_r", &models::cpb_omega_r, py::arg("atom"), py::arg("resonator"));
  m.def("capshunt_e_c", &models::capshunt_e_c, py::arg("e_c1"), py::arg("e_c2"));
  m.def("resonator_from_x_flux", &models::resonator_from_x_flux, py::arg("omega_r"),
        py::arg("x"));
  m.def("resonator_from_x_charge", &models::resonator_from_x_charge, py::arg("e_c1"),
        py::arg("e_c2"), py::arg("x"));
  m.def("coupled_mode_parity", &models::coupled_mode_parity, py::arg("n1"), py::arg("n2"));
  m.def("rabi_parity", &models::rabi_parity, py::arg("n_photon"));

  // ------- spectral engine -------

  py::enum_<spectral::Precision>(m, "Precision")
      .value("Double", spectral::Precision::Double)
      .value("LongDouble", spectral::Precision::LongDouble);

  py::class_<spectral::EigensolveOptions>(m, "EigensolveOptions")
      .def(py::init<>())
      .def_readwrite("precision", &spectral::EigensolveOptions::precision)
      .def_readwrite("dense_threshold", &spectral::EigensolveOptions::dense_threshold)
      .def_readwrite("residual_tol", &spectral::EigensolveOptions::residual_tol)
      .def_readwrite("lanczos_max_iter", &spectral::EigensolveOptions::lanczos_max_iter)
      .def_readwrite("lanczos_seed", &spectral::EigensolveOptions::lanczos_seed);

  py::class_<spectral::ConvergeRecord>(m, "ConvergeRecord")
      .def_readonly("dims", &spectral::ConvergeRecord::dims)
      .def_readonly("eigenvalues", &spectral::ConvergeRecord::eigenvalues)
      .def_readonly("drift", &spectral::ConvergeRecord::drift);

  py::class_<spectral::SpectralResult>(m, "SpectralResult")
      .def_readonly("eigenvalues", &spectral::SpectralResult::eigenvalues)
      .def_readonly("eigenvectors", &spectral::SpectralResult::eigenvectors)
      .def_readonly("basis_dims", &spectral::SpectralResult::basis_dims)
      .def_readonly("converged", &spectral::SpectralResult::converged)
      .def_readonly("history", &spectral::SpectralResult::history)
      .def_readonly("residual_norm", &spectral::SpectralResult::residual_norm);

  py::class_<spectral::TruncationPolicy>(m, "TruncationPolicy")
      .def(py::init<>())
      .def_readwrite("k", &spectral::TruncationPolicy::k)
      .def_readwrite("tol", &spectral::TruncationPolicy::tol)
      .def_readwrite("start_dims", &spectral::TruncationPolicy::start_dims)
      .def_readwrite("step", &spectral::TruncationPolicy::step)
      .def_readwrite("max_dims", &spectral::TruncationPolicy::max_dims)
      .def_readwrite("solver", &spectral::TruncationPolicy::solver);

  m.def("eigensolve",
        py::overload_cast<const HermitianOperator&, int, const spectral::EigensolveOptions&>(
            &spectral::eigensolve),
        py::arg("h"), py::arg("k"), py::arg("options") = spectral::EigensolveOptions{});
  m.def("eigensolve",
        py::overload_cast<const ops::ProductOperator&, int, const spectral::EigensolveOptions&>(
            &spectral::eigensolve),
        py::arg("h"), py::arg("k"), py::arg("options") = spectral::EigensolveOptions{});
  m.def("eigensolve_parity", &eigensolve_parity, py::arg("h"), py::arg("k"), py::arg("parity"),
        py::arg("options") = spectral::EigensolveOptions{},
        "eigensolve with degenerate pairs rotated to parity eigenstates");
  m.def("converge_truncation", &spectral::converge_truncation, py::arg("factory"),
        py::arg("policy"),
        "grow basis dimensions until the lowest eigenvalues stop drifting; the factory "
        "maps a dims list to a ProductOperator");

  // ------- observables -------

  py::enum_<obs::Factor>(m, "Factor")
      .value("Atom", obs::Factor::Atom)
      .value("Photon", obs::Factor::Photon);

  m.def("mode_occupation", &obs::mode_occupation, py::arg("state"), py::arg("dim_atom"),
        py::arg("dim_photon"), py::arg("which"));
  m.def("photon_number", &obs::photon_number, py::arg("state"), py::arg("dim_atom"),
        py::arg("dim_photon"));
  m.def("entanglement_spectrum", &obs::entanglement_spectrum, py::arg("state"),
        py::arg("dim_atom"), py::arg("dim_photon"), py::arg("trace_out"));
  m.def("parity_expectation", &obs::parity_expectation, py::arg("state"), py::arg("parity"));
  m.def("leading_atom_vectors", &obs::leading_atom_vectors, py::arg("state"),
        py::arg("dim_atom"), py::arg("dim_photon"), py::arg("count"));
  m.def("dressed_index", &obs::dressed_index, py::arg("result"), py::arg("atom_vectors"),
        py::arg("m"), py::arg("n"), py::arg("dim_photon"));

  py::class_<obs::DispersiveShift>(m, "DispersiveShift")
      .def_readonly("chi01", &obs::DispersiveShift::chi01)
      .def_readonly("two_level", &obs::DispersiveShift::two_level)
      .def_readonly("terms", &obs::DispersiveShift::terms);
  m.def("dispersive_shift_chi01", &obs::dispersive_shift_chi01, py::arg("bare"),
        py::arg("theta"), py::arg("omega_r"), py::arg("x"), py::arg("n_levels"));

  py::class_<obs::CatReference>(m, "CatReference")
      .def(py::init([](double alpha, double normalization) {
             return obs::CatReference{alpha, normalization};
           }),
           py::arg("alpha"), py::arg("normalization") = 0.7071067811865476)
      .def_readwrite("alpha", &obs::CatReference::alpha)
      .def_readwrite("normalization", &obs::CatReference::normalization);
  m.def("cat_fidelity", &obs::cat_fidelity, py::arg("state"), py::arg("dim_atom"),
        py::arg("dim_photon"), py::arg("reference"), py::arg("atom_subspace"));

  // ------- sweeps and the renormalized fit -------

  py::enum_<sweep::Model>(m, "Model")
      .value("CoupledLC", sweep::Model::CoupledLC)
      .value("Fluxonium", sweep::Model::Fluxonium)
      .value("CPB", sweep::Model::CPB)
      .value("Rabi", sweep::Model::Rabi)
      .value("Capshunt", sweep::Model::Capshunt);

  py::enum_<sweep::Axis>(m, "Axis")
      .value("X", sweep::Axis::X)
      .value("XSquared", sweep::Axis::XSquared)
      .value("ThetaExt", sweep::Axis::ThetaExt)
      .value("Ng", sweep::Axis::Ng);

  py::class_<sweep::SweepOutputs>(m, "SweepOutputs")
      .def(py::init<>())
      .def_readwrite("k", &sweep::SweepOutputs::k)
      .def_readwrite("levels", &sweep::SweepOutputs::levels)
      .def_readwrite("photon_number", &sweep::SweepOutputs::photon_number)
      .def_readwrite("entanglement", &sweep::SweepOutputs::entanglement)
      .def_readwrite("parity", &sweep::SweepOutputs::parity)
      .def_readwrite("rabi_overlay", &sweep::SweepOutputs::rabi_overlay)
      .def_readwrite("capshunt_overlay", &sweep::SweepOutputs::capshunt_overlay);

  py::class_<sweep::SweepSpec>(m, "SweepSpec")
      .def(py::init<>())
      .def_readwrite("model", &sweep::SweepSpec::model)
      .def_readwrite("axis", &sweep::SweepSpec::axis)
      .def_readwrite("from_", &sweep::SweepSpec::from)
      .def_readwrite("to", &sweep::SweepSpec::to)
      .def_readwrite("points", &sweep::SweepSpec::points)
      .def_readwrite("lc", &sweep::SweepSpec::lc)
      .def_readwrite("gauge", &sweep::SweepSpec::gauge)
      .def_readwrite("fluxonium", &sweep::SweepSpec::fluxonium)
      .def_readwrite("cpb", &sweep::SweepSpec::cpb)
      .def_readwrite("rabi", &sweep::SweepSpec::rabi)
      .def_readwrite("omega_r", &sweep::SweepSpec::omega_r)
      .def_readwrite("e_c2", &sweep::SweepSpec::e_c2)
      .def_readwrite("e_l2", &sweep::SweepSpec::e_l2)
      .def_readwrite("x_fixed", &sweep::SweepSpec::x_fixed)
      .def_readwrite("policy", &sweep::SweepSpec::policy)
      .def_readwrite("outputs", &sweep::SweepSpec::outputs)
      .def("validate", &sweep::SweepSpec::validate);

  py::class_<sweep::SweepRow>(m, "SweepRow")
      .def_readonly("axis", &sweep::SweepRow::axis)
      .def_readonly("values", &sweep::SweepRow::values)
      .def_readonly("error", &sweep::SweepRow::error)
      .def_readonly("converged", &sweep::SweepRow::converged);

  py::class_<sweep::SweepTable>(m, "SweepTable")
      .def_readonly("axis_name", &sweep::SweepTable::axis_name)
      .def_readonly("columns", &sweep::SweepTable::columns)
      .def_readonly("rows", &sweep::SweepTable::rows)
      .def_readonly("provenance", &sweep::SweepTable::provenance)
      .def_readonly("all_converged", &sweep::SweepTable::all_converged);

  m.def("run_sweep", &sweep::run_sweep, py::arg("spec"),
        py::call_guard<py::gil_scoped_release>());
  m.def("converge_point", &sweep::converge_point, py::arg("spec"), py::arg("axis_value"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<sweep::FitOptions>(m, "FitOptions")
      .def(py::init<>())
      .def_readwrite("n_levels", &sweep::FitOptions::n_levels)
      .def_readwrite("max_iterations", &sweep::FitOptions::max_iterations)
      .def_readwrite("restarts", &sweep::FitOptions::restarts)
      .def_readwrite("tol", &sweep::FitOptions::tol)
      .def_readwrite("seed", &sweep::FitOptions::seed);

  py::class_<sweep::RenormalizedFitResult>(m, "RenormalizedFitResult")
      .def_readonly("e_j_star", &sweep::RenormalizedFitResult::e_j_star)
      .def_readonly("e_c_star", &sweep::RenormalizedFitResult::e_c_star)
      .def_readonly("e_l_star", &sweep::RenormalizedFitResult::e_l_star)
      .def_readonly("residual", &sweep::RenormalizedFitResult::residual)
      .def_readonly("residual_init", &sweep::RenormalizedFitResult::residual_init)
      .def_readonly("iterations", &sweep::RenormalizedFitResult::iterations)
      .def_readonly("converged", &sweep::RenormalizedFitResult::converged);

  m.def("fit_renormalized_fluxonium", &sweep::fit_renormalized_fluxonium, py::arg("target"),
        py::arg("n_transitions"), py::arg("init"), py::arg("options") = sweep::FitOptions{},
        py::call_guard<py::gil_scoped_release>());

  // ------- serialization -------

  py::enum_<io::Format>(m, "Format")
      .value("Csv", io::Format::Csv)
      .value("Json", io::Format::Json);
  m.def("serialize", &io::serialize, py::arg("table"), py::arg("envelope"),
        py::arg("format"));
}
