"""
Unit tests for the closed-form tables of the deformed CP^2 model on SU(3).
"""
import unittest
from pathlib import Path
import sys

import numpy as np
from numpy.testing import assert_allclose

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from core.algebra import dagger
from core.appendix import (
    AppendixPoint,
    biyb_su3_appendix,
    closed_action,
    general_action,
    sign_variant_deviation,
    undeformed_action,
)
from core.errors import DomainError


class TestAppendixPoint(unittest.TestCase):
    """Test the (a, b, theta) parametrization"""

    def test_unitary(self):
        """Test k = k1(a, b) k2(theta) is special unitary"""
        point = AppendixPoint.random(np.random.default_rng(0))
        k = point.k()
        assert_allclose(k @ dagger(k), np.eye(3), atol=1e-14)
        self.assertAlmostEqual(abs(np.linalg.det(k) - 1), 0.0, places=13)

    def test_velocity(self):
        """Test kdot matches a finite difference along the velocity"""
        point = AppendixPoint.random(np.random.default_rng(1))
        h = 1e-6

        def moved(t):
            a, b = point.a + t * point.adot, point.b + t * point.bdot
            norm = np.sqrt(abs(a) ** 2 + abs(b) ** 2)
            return AppendixPoint(a / norm, b / norm, point.theta + t * point.thetadot).k()

        numeric = (moved(h) - moved(-h)) / (2 * h)
        assert_allclose(numeric, point.kdot(), atol=1e-8)

    def test_rejects_unnormalized(self):
        """Test |a|^2 + |b|^2 != 1 is a DomainError"""
        with self.assertRaises(DomainError):
            AppendixPoint(1.0, 0.5, 0.3)

    def test_rejects_radial_velocity(self):
        """Test a velocity leaving the unit sphere is a DomainError"""
        with self.assertRaises(DomainError):
            AppendixPoint(1.0, 0.0, 0.3, adot=0.2)


class TestClosedForms(unittest.TestCase):
    """Test the tables and the closed action against the general machinery"""

    def test_suite_passes(self):
        """Test every table with and without the second deformation"""
        for eta, mu in ((0.7, 0.3), (0.4, 0.0)):
            with self.subTest(eta=eta, mu=mu):
                report = biyb_su3_appendix(eta, mu, samples=5, seed=3)
                self.assertTrue(report.passed, report.model_dump())

    def test_closed_action(self):
        """Test the closed action at one point"""
        point = AppendixPoint.random(np.random.default_rng(4))
        self.assertAlmostEqual(closed_action(point, 0.6, 0.2), general_action(point, 0.6, 0.2), places=9)

    def test_undeformed_action(self):
        """Test the undeformed closed form against the general integrand at eta = mu = 0"""
        point = AppendixPoint.random(np.random.default_rng(5))
        self.assertAlmostEqual(undeformed_action(point), general_action(point, 0.0, 0.0), places=9)

    def test_flipped_signs_deviate(self):
        """Test the alternate-sign variants miss the general machinery when mu != 0"""
        point = AppendixPoint.random(np.random.default_rng(6))
        deviation = sign_variant_deviation(point, 0.7, 0.3)
        self.assertGreater(max(deviation.values()), 1e-6)

    def test_rejects_negative_parameters(self):
        """Test negative eta or mu is a DomainError"""
        with self.assertRaises(DomainError):
            biyb_su3_appendix(0.5, -0.1, samples=1)


if __name__ == "__main__":
    unittest.main()
