"""
Unit tests for the reduction of the homogeneous-coordinate CP^N model.
"""
import unittest
from pathlib import Path
import sys

import numpy as np
from numpy.testing import assert_allclose

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from core.errors import ChartDomainError, DimensionMismatchError, DomainError
from core.reduction import (
    HomogeneousState,
    chart_recovery,
    homogeneous_from_chart,
    projected_rhs,
    random_constrained_state,
    reduced_pair,
    reduction_suite,
    tilde_hamiltonian,
    trajectory_lax_residual,
    unreduced_flow,
)
from models import SuiteReport


class TestHomogeneousState(unittest.TestCase):
    """Test constraints and gauge transformations of (Z, Y)"""

    def setUp(self):
        self.rng = np.random.default_rng(17)

    def test_origin(self):
        """Test the origin satisfies both constraints and only moves along the gauge orbit"""
        origin = HomogeneousState.origin(2)
        self.assertEqual(origin.N, 2)
        self.assertEqual(origin.constraint_violation(), 0.0)
        Zdot, Ydot = unreduced_flow(origin)
        self.assertLess(np.max(np.abs(Zdot)), 1e-15)
        assert_allclose(Ydot, 18 * origin.Z, atol=1e-14)
        rates = projected_rhs(origin)
        self.assertLess(np.max(np.abs(rates.W)) + np.max(np.abs(rates.J)), 1e-15)

    def test_shape_mismatch(self):
        """Test Z and Y of different length are rejected"""
        with self.assertRaises(DimensionMismatchError):
            HomogeneousState(np.zeros(3, dtype=complex), np.zeros(2, dtype=complex))

    def test_random_state_constrained(self):
        """Test random draws lie on the constraint surface"""
        state = random_constrained_state(3, self.rng)
        self.assertLess(state.constraint_violation(), 1e-12)

    def test_hamiltonian_gauge_invariant(self):
        """Test H is invariant under phase rotation and real shifts of Y along Z"""
        state = random_constrained_state(2, self.rng)
        H = tilde_hamiltonian(state)
        self.assertAlmostEqual(tilde_hamiltonian(state.phase_rotated(0.9)), H, places=11)
        self.assertAlmostEqual(tilde_hamiltonian(state.shifted(-1.3)), H, places=11)

    def test_reduced_pair_gauge_invariant(self):
        """Test (W, J) does not see the gauge orbit"""
        state = random_constrained_state(2, self.rng)
        base = reduced_pair(state)
        moved = reduced_pair(state.phase_rotated(-0.4).shifted(0.8))
        assert_allclose(moved.W, base.W, atol=1e-12)
        assert_allclose(moved.J, base.J, atol=1e-12)

    def test_chart_round_trip(self):
        """Test the chart point is recovered from the gauge-fixed state"""
        chi = np.array([0.2 - 0.1j, 0.3j])
        state = homogeneous_from_chart(chi, np.array([0.5, -0.2 + 0.4j]))
        recovered, _ = chart_recovery(state.phase_rotated(1.1))
        assert_allclose(recovered, chi, atol=1e-12)

    def test_chart_recovery_off_chart(self):
        """Test Z_{N+1} = 0 is a ChartDomainError"""
        state = HomogeneousState(np.array([1.0, 0.0], dtype=complex), np.zeros(2, dtype=complex))
        with self.assertRaises(ChartDomainError):
            chart_recovery(state)


class TestReductionSuite(unittest.TestCase):
    """Test the full reduction suite"""

    def test_suite_passes(self):
        """Test CP^1 and CP^2 over a short trajectory"""
        for N in (1, 2):
            with self.subTest(N=N):
                report = reduction_suite(N=N, samples=5, seed=N, t_end=0.2)
                self.assertIsInstance(report, SuiteReport)
                self.assertEqual(report.suite, f"reduction-cp{N}")
                self.assertTrue(report.passed, report.model_dump())
                self.assertLess(report.get("reduced-lax").residual, 1e-10)
                self.assertLess(report.get("chart-recovery").residual, 1e-6)

    def test_rejects_n0(self):
        """Test N < 1 is a DomainError"""
        with self.assertRaises(DomainError):
            reduction_suite(N=0)

    def test_trajectory_lax_needs_samples(self):
        """Test the five-point stencil needs five samples"""
        with self.assertRaises(DomainError):
            trajectory_lax_residual([HomogeneousState.origin(1)] * 3, 0.1, 0.3)


if __name__ == "__main__":
    unittest.main()
