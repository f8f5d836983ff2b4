"""
Unit tests for the spherical pendulum and the principal chiral model on T*SU(N).
"""
import unittest
from pathlib import Path
import sys

import numpy as np
from numpy.testing import assert_allclose

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from core.algebra import dagger, random_special_unitary, random_su
from core.dynamics import current_of, hamiltonian
from core.errors import DomainError
from core.pendulum import (
    model_energy,
    pcm_first_order_integrand,
    pcm_momentum,
    pcm_second_order_integrand,
    pcm_second_order_residual,
    pcm_spec,
    pcm_suite,
    pendulum_oracle,
    pendulum_spec,
    pendulum_suite,
    pendulum_zeta,
    point_from_sphere,
    sphere_point,
    sphere_state,
    su2_from_sphere,
)


class TestSphereMap(unittest.TestCase):
    """Test the map from T*SU(2) to the tangent bundle of S^2"""

    def setUp(self):
        self.spec = pendulum_spec()

    def test_su2_from_sphere(self):
        """Test k zeta k^-1 = i x . sigma"""
        x = np.array([0.3, -0.4, np.sqrt(1 - 0.25)])
        k = su2_from_sphere(x)
        assert_allclose(sphere_point(k @ pendulum_zeta() @ dagger(k)), x, atol=1e-14)

    def test_point_from_sphere_round_trip(self):
        """Test the group point reproduces the position and velocity it was built from"""
        x = np.array([np.sin(0.7) * np.cos(0.2), np.sin(0.7) * np.sin(0.2), np.cos(0.7)])
        xdot = np.cross(x, [0.1, 0.5, -0.3])
        point = point_from_sphere(x, xdot, self.spec)
        x_out, v_out = sphere_state(point, self.spec)
        assert_allclose(x_out, x, atol=1e-12)
        assert_allclose(v_out, xdot, atol=1e-12)

    def test_hamiltonian_closed_form(self):
        """Test H = 1/4 |x'|^2 + 2 - 2 x3"""
        x = np.array([0.0, np.sin(0.4), np.cos(0.4)])
        xdot = np.array([0.6, 0.0, 0.0])
        point = point_from_sphere(x, xdot, self.spec)
        H = hamiltonian(current_of(point, self.spec), self.spec)
        self.assertAlmostEqual(H, model_energy(x, xdot), places=12)

    def test_rejects_off_sphere(self):
        """Test positions off the sphere and non-tangent velocities are rejected"""
        with self.assertRaises(DomainError):
            point_from_sphere((0.0, 0.0, 2.0), (0.0, 0.0, 0.0), self.spec)
        with self.assertRaises(DomainError):
            point_from_sphere((0.0, 0.0, 1.0), (0.0, 0.0, 1.0), self.spec)


class TestPendulum(unittest.TestCase):
    """Test the E-model against the direct pendulum integrator"""

    def test_suite(self):
        """Test energy, oracle and fixed points over a short run"""
        report = pendulum_suite(t_end=1.0, oracle_t_end=1.0)
        for check in report.checks:
            with self.subTest(check=check.name):
                self.assertTrue(check.passed, f"{check.name}: {check.residual:.3e}")
        self.assertEqual({c.name for c in report.checks}, {
            "initial-state", "hamiltonian-closed-form", "energy-drift", "hamiltonian-drift",
            "oracle-agreement", "fixed-points",
        })

    def test_oracle_keeps_unit_norm(self):
        """Test the direct integrator stays on the sphere"""
        xs, _ = pendulum_oracle((np.sin(1.0), 0.0, np.cos(1.0)), (0.0, 0.8, 0.0), np.linspace(0, 2, 21))
        assert_allclose(np.linalg.norm(xs, axis=1), np.ones(21), atol=1e-8)


class TestPrincipalChiral(unittest.TestCase):
    """Test the first and second order principal chiral actions"""

    def setUp(self):
        self.rng = np.random.default_rng(13)

    def test_momentum_elimination(self):
        """Test the first order action at its stationary momentum equals the second order one"""
        zeta = pcm_spec(3).xi_matrix
        k = random_special_unitary(3, self.rng)
        kdot = k @ random_su(3, self.rng)
        rho_p = pcm_momentum(k, kdot, zeta)
        self.assertAlmostEqual(pcm_first_order_integrand(k, kdot, rho_p, zeta),
                               pcm_second_order_integrand(k, kdot, zeta), places=11)

    def test_suite(self):
        """Test the PCM suite for N = 2 and 3"""
        for N in (2, 3):
            with self.subTest(N=N):
                report = pcm_suite(N=N, samples=10, seed=1, t_end=0.1)
                self.assertTrue(report.passed, report.model_dump())

    def test_needs_nine_samples(self):
        """Test the five-point split needs nine samples"""
        ks = [np.eye(2, dtype=complex)] * 5
        with self.assertRaises(DomainError):
            pcm_second_order_residual(ks, 0.1, pendulum_zeta())

    def test_pcm_needs_n2(self):
        """Test N < 2 is rejected"""
        with self.assertRaises(DomainError):
            pcm_suite(N=1)


if __name__ == "__main__":
    unittest.main()
