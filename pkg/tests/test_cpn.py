"""
Unit tests for the CP^N model in the affine chart and in homogeneous coordinates.
"""
import unittest
from pathlib import Path
import sys

import numpy as np
from numpy.testing import assert_allclose

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from core.algebra import TStarElement, dagger, is_su
from core.cpn import (
    chart_alpha,
    chart_from_homogeneous,
    chart_point_velocity,
    chart_velocity,
    cpn_chart_embed,
    cpn_suite,
    cpn_zeta,
    first_order_flow,
    first_order_integrand_p,
    first_order_integrand_w,
    global_integrand,
    hamiltonian_w,
    homogeneous,
    homogeneous_velocity,
    integrate_chart_flow,
    point_from_chart,
    second_order_integrand,
)
from core.doubles import EOperator, TStarDouble
from core.dynamics import ModelSpec, current_of
from core.errors import ChartDomainError, DimensionMismatchError, DomainError


class TestChart(unittest.TestCase):
    """Test the gauge-fixed embedding of the chart"""

    def setUp(self):
        self.chi = np.array([0.3, 0.2j])
        self.chidot = np.array([0.5, 0.1])

    def test_zeta(self):
        """Test zeta = i diag(1, ..., 1, -N) is in su(N+1)"""
        zeta = cpn_zeta(3)
        self.assertEqual(zeta.shape, (4, 4))
        self.assertTrue(is_su(zeta))
        with self.assertRaises(DomainError):
            cpn_zeta(0)

    def test_embedding_unitary(self):
        """Test k(chi) is unitary with last column Z(chi)"""
        k = cpn_chart_embed(self.chi)
        assert_allclose(dagger(k) @ k, np.eye(3), atol=1e-14)
        assert_allclose(k[:, -1], homogeneous(self.chi), atol=1e-15)

    def test_alpha_at_origin(self):
        """Test alpha(0) = 1/2"""
        self.assertEqual(chart_alpha(np.zeros(2, dtype=complex)), 0.5)

    def test_chart_boundary(self):
        """Test |chi| >= 1 is a ChartDomainError"""
        with self.assertRaises(ChartDomainError) as ctx:
            cpn_chart_embed(np.array([0.8, 0.6]))
        self.assertAlmostEqual(ctx.exception.norm, 1.0, places=12)

    def test_chart_from_homogeneous(self):
        """Test a rescaled, rephased Z returns to the same chart point"""
        Z = homogeneous(self.chi) * 2.5 * np.exp(0.7j)
        assert_allclose(chart_from_homogeneous(Z), self.chi, atol=1e-14)

    def test_shape_mismatch(self):
        """Test chi and chi. of different length are rejected"""
        with self.assertRaises(DimensionMismatchError):
            second_order_integrand(self.chi, np.array([0.1, 0.2, 0.3]))


class TestPointVelocity(unittest.TestCase):
    """Test the chart velocity of the E-model point built from (chi, w)"""

    CASES = [
        (np.array([0.3 + 0.1j]), np.array([0.4 - 0.2j])),
        (np.array([0.3, 0.2j]), np.array([0.5 + 0.1j, -0.3j])),
        (np.array([0.1 - 0.4j, 0.2, 0.3j]), np.array([0.2, 0.6 - 0.1j, -0.4])),
    ]

    def test_chart_velocity_is_minus_i_w(self):
        """Test v(chi, chi.) = -i w"""
        for chi, w in self.CASES:
            with self.subTest(N=len(chi)):
                assert_allclose(chart_velocity(chi, chart_point_velocity(chi, w)), -1j * w, atol=1e-12)

    def test_matches_group_flow(self):
        """Test chi. against the gauge-fixed chart moved along dl/dt = (E j) l"""
        h = 1e-5
        for chi, w in self.CASES:
            with self.subTest(N=len(chi)):
                N = len(chi)
                zeta = cpn_zeta(N)
                spec = ModelSpec(TStarDouble(N + 1), EOperator.tstar(N + 1),
                                 TStarElement(zeta, np.zeros_like(zeta)))
                D = spec.double
                l = point_from_chart(chi, w, zeta)
                x = spec.e_op(current_of(l, spec))
                plus = chart_from_homogeneous(D.multiply(D.exp(x * h), l).k[:, -1])
                minus = chart_from_homogeneous(D.multiply(D.exp(x * -h), l).k[:, -1])
                assert_allclose((plus - minus) / (2 * h), chart_point_velocity(chi, w), atol=1e-7)


class TestActions(unittest.TestCase):
    """Test the chart, global and first order actions"""

    def setUp(self):
        self.chi = np.array([0.3, 0.2j])
        self.chidot = np.array([0.5, 0.1])

    def test_chart_matches_global(self):
        """Test the chart integrand equals the Fubini-Study form with the potential"""
        Z, Zdot = homogeneous(self.chi), homogeneous_velocity(self.chi, self.chidot)
        self.assertAlmostEqual(second_order_integrand(self.chi, self.chidot), global_integrand(Z, Zdot), places=12)

    def test_flipped_sign_deviates(self):
        """Test the opposite sign of the d|Z_{N+1}|/dt term breaks the match"""
        Z, Zdot = homogeneous(self.chi), homogeneous_velocity(self.chi, self.chidot)
        flipped = second_order_integrand(self.chi, self.chidot, sign=-1.0)
        self.assertGreater(abs(flipped - global_integrand(Z, Zdot)), 1e-6)

    def test_first_order_at_stationary_momentum(self):
        """Test the first order integrand at w = i v equals the second order one"""
        v = chart_velocity(self.chi, self.chidot)
        self.assertAlmostEqual(first_order_integrand_w(self.chi, self.chidot, 1j * v),
                               second_order_integrand(self.chi, self.chidot), places=12)

    def test_first_order_p_stationary_on_flow(self):
        """Test the p-form action is stationary in p when chi. follows the first order flow"""
        p = np.array([0.2 - 0.3j, 0.4 + 0.1j])
        chidot, _ = first_order_flow(self.chi, p)
        h = 1e-6
        for direction in (np.array([1.0, 0.0]), np.array([0.0, 1j]), np.array([0.3 - 0.2j, 0.5])):
            with self.subTest(direction=direction):
                variation = (first_order_integrand_p(self.chi, chidot, p + h * direction)
                             - first_order_integrand_p(self.chi, chidot, p - h * direction)) / (2 * h)
                self.assertLess(abs(variation), 1e-8)

    def test_hamiltonian_at_origin(self):
        """Test H(0, w) = |w|^2"""
        w = np.array([0.4 - 0.1j, 0.2j])
        self.assertAlmostEqual(hamiltonian_w(np.zeros(2, dtype=complex), w), float(np.vdot(w, w).real), places=14)


class TestSuite(unittest.TestCase):
    """Test the full comparison suite"""

    def test_suite_passes(self):
        """Test CP^1, CP^2 and CP^3"""
        for N in (1, 2, 3):
            with self.subTest(N=N):
                report = cpn_suite(N, samples=10, seed=N, t_end=0.2)
                self.assertTrue(report.passed, report.model_dump())

    def test_chart_flow_conserves_energy(self):
        """Test the RK4 chart flow conserves the Hamiltonian"""
        traj = integrate_chart_flow(np.array([0.2, 0.1j]), np.array([0.1, -0.05j]), t_end=0.5, dt=1e-3)
        self.assertEqual(len(traj.times), 501)
        self.assertLess(traj.energy_drift, 1e-8)

    def test_chart_flow_rejects_step(self):
        """Test non-positive dt is a DomainError"""
        with self.assertRaises(DomainError):
            integrate_chart_flow(np.array([0.2]), np.array([0.1]), t_end=1.0, dt=-1e-3)


if __name__ == "__main__":
    unittest.main()
