"""Smoke tests for the Python module: one assertion per exposed area.

Numerical depth lives in the C++ suites; here we check that the bindings
construct, run, and hand back the right shapes and a few closed-form values.
"""

import math
import unittest

import _uscqed as u


class OperatorTests(unittest.TestCase):
    def test_version_and_fock(self):
        self.assertRegex(u.__version__, r"^\d+\.\d+\.\d+$")
        n = u.fock_number(4)
        self.assertEqual(n.shape, (4, 4))
        self.assertAlmostEqual(abs(n[3, 3]), 3.0, places=15)
        p = u.fock_parity(4)
        self.assertAlmostEqual(abs(p[1, 1] + 1.0), 0.0, places=15)

    def test_product_operator_apply(self):
        a, adag = u.fock_ladder(6)
        h = u.ProductOperator(6, 1)
        h.add_left(adag @ a)
        self.assertEqual(h.dim, 6)
        dense = h.dense()
        self.assertAlmostEqual(abs(dense[5, 5] - 5.0), 0.0, places=14)


class ModelTests(unittest.TestCase):
    def test_rabi_ground_state(self):
        # omega_a = 0: exact doubly degenerate ground level at -g^2/omega_r
        h = u.build_quantum_rabi(u.RabiParams(omega_r=1.0, omega_a=0.0, g=2.0), 120)
        r = u.eigensolve(h, 3)
        self.assertLess(abs(r.eigenvalues[0] + 4.0), 1e-10)
        self.assertLess(r.eigenvalues[1] - r.eigenvalues[0], 1e-10)

    def test_coupled_lc_modes_match_exact(self):
        p = u.CoupledLCParams(omega1=1.7, omega2=2.3, x=0.4)
        hi, lo = u.normal_modes_exact(p)
        nhi, nlo = u.coupled_lc_normal_modes(p, u.Gauge.Flux, 50, 50, 8)
        self.assertLess(abs(hi - nhi), 1e-10)
        self.assertLess(abs(lo - nlo), 1e-10)

    def test_resonator_maps_invert(self):
        res = u.resonator_from_x_flux(2.47, 0.8)
        self.assertLess(abs(u.x_flux(res) - 0.8), 1e-12)
        with self.assertRaises(ValueError):
            u.resonator_from_x_flux(2.47, 0.0)

    def test_truncate_to_rabi_requires_sweet_spot(self):
        atom = u.FluxoniumParams(e_j=5.0, e_c1=5.0, e_l1=0.5, theta_ext=math.pi)
        res = u.resonator_from_x_flux(2.47, 0.1)
        rp = u.truncate_to_rabi(atom, res, 80)
        self.assertGreater(rp.g, 0.0)
        atom.theta_ext = 0.9 * math.pi
        with self.assertRaises(ValueError):
            u.truncate_to_rabi(atom, res, 80)


class SpectralTests(unittest.TestCase):
    def test_parity_resolved_degenerate_doublet(self):
        h = u.build_quantum_rabi(u.RabiParams(omega_r=1.0, omega_a=0.0, g=2.0), 100)
        r = u.eigensolve_parity(h, 2, u.rabi_parity(100))
        s0 = u.parity_expectation(r.eigenvectors[:, 0], u.rabi_parity(100))
        s1 = u.parity_expectation(r.eigenvectors[:, 1], u.rabi_parity(100))
        self.assertGreater(abs(s0), 1.0 - 1e-8)
        self.assertLess(s0 * s1, 0.0)

    def test_converge_truncation_with_python_factory(self):
        params = u.RabiParams(omega_r=1.0, omega_a=1.0, g=1.5)

        def factory(dims):
            return u.build_quantum_rabi(params, dims[0])

        policy = u.TruncationPolicy()
        policy.k = 4
        policy.start_dims = [20]
        policy.step = 20
        policy.max_dims = [160]
        policy.tol = 1e-8
        r = u.converge_truncation(factory, policy)
        self.assertTrue(r.converged)
        self.assertGreaterEqual(len(r.history), 2)
        self.assertLessEqual(r.history[-1].drift, 1e-8)


class ObservableTests(unittest.TestCase):
    def test_photon_number_and_entanglement(self):
        h = u.build_quantum_rabi(u.RabiParams(omega_r=1.0, omega_a=0.0, g=2.0), 120)
        r = u.eigensolve(h, 2)
        state = r.eigenvectors[:, 0]
        # the displaced ground state holds alpha^2 = (g/omega_r)^2 photons
        self.assertLess(abs(u.photon_number(state, 2, 120) - 4.0), 1e-6)
        spectrum = u.entanglement_spectrum(state, 2, 120, u.Factor.Photon)
        self.assertLess(abs(sum(spectrum) - 1.0), 1e-10)


class SweepTests(unittest.TestCase):
    def test_rabi_sweep_table(self):
        s = u.SweepSpec()
        s.model = u.Model.Rabi
        s.axis = u.Axis.X
        s.rabi = u.RabiParams(omega_r=1.0, omega_a=1.0, g=0.0)
        s.from_, s.to, s.points = 0.0, 2.0, 3
        s.policy.k = 2
        s.policy.start_dims = [40]
        s.policy.max_dims = [120]
        s.outputs.k = 1
        s.outputs.photon_number = True
        t = u.run_sweep(s)
        self.assertEqual(t.columns, ["w01", "photon_number"])
        self.assertEqual([row.axis for row in t.rows], [0.0, 1.0, 2.0])
        self.assertTrue(t.all_converged)
        # deep-coupling transition is exponentially suppressed
        self.assertLess(t.rows[2].values[0], 1e-3)
        csv = u.serialize(t, [("command", "smoke")], u.Format.Csv)
        self.assertIn("# command=smoke", csv)
        self.assertIn("x,w01,photon_number,error", csv)


if __name__ == "__main__":
    unittest.main()
