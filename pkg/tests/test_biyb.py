"""
Unit tests for the bi-Yang-Baxter models on SL(N, C).
"""
import unittest
from pathlib import Path
import sys

import numpy as np
from numpy.testing import assert_allclose

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from core.algebra import cartan_element, project_complement, random_special_unitary, random_su
from core.biyb import (
    OperatorBlock,
    biyb_su2_suite,
    biyb_suite,
    point_from_momentum,
    spherical_coordinates,
    su2_closed_form,
    su2_closed_form_spherical,
    unipotent_conjugator,
    yb_cpn_suite,
)
from core.doubles import iwasawa_decompose
from core.errors import DomainError


class TestOperatorBlock(unittest.TestCase):
    """Test the deformation W and the block B"""

    def setUp(self):
        self.rng = np.random.default_rng(31)
        self.xi = cartan_element([2.0, 0.0, -2.0])

    def test_undeformed_block_is_identity(self):
        """Test B = 1 at eta = mu = 0"""
        block = OperatorBlock(random_special_unitary(3, self.rng), self.xi, 0.0, 0.0)
        assert_allclose(block.matrix, np.eye(6), atol=1e-15)

    def test_block_symmetric_positive(self):
        """Test B = 1 - P-perp W^2 P-perp is symmetric positive definite"""
        block = OperatorBlock(random_special_unitary(3, self.rng), self.xi, 0.7, 0.3)
        assert_allclose(block.matrix, block.matrix.T, atol=1e-12)
        self.assertGreaterEqual(np.min(np.linalg.eigvalsh(block.matrix)), 1.0 - 1e-12)

    def test_coordinates(self):
        """Test element and coordinates are inverse on the complement"""
        block = OperatorBlock(random_special_unitary(3, self.rng), self.xi, 0.5, 0.2)
        X = project_complement(self.xi, random_su(3, self.rng))
        assert_allclose(block.element(block.coordinates(X)), X, atol=1e-14)

    def test_rejects_non_unitary(self):
        """Test a non-unitary k is a DomainError"""
        with self.assertRaises(DomainError):
            OperatorBlock(2 * np.eye(3, dtype=complex), self.xi, 0.5, 0.2)

    def test_rejects_negative_parameters(self):
        """Test negative eta or mu is a DomainError"""
        with self.assertRaises(DomainError):
            OperatorBlock(np.eye(3, dtype=complex), self.xi, -0.5, 0.2)


class TestGroupPoints(unittest.TestCase):
    """Test the SL(N, C) point built from (k, rho')"""

    def setUp(self):
        self.rng = np.random.default_rng(2)
        self.xi = cartan_element([2.0, 0.0, -2.0])

    def test_unipotent_conjugator(self):
        """Test n xi n^-1 - xi = T with n unit upper triangular"""
        T = np.triu(random_su(3, self.rng), 1)
        n = unipotent_conjugator(self.xi, T)
        assert_allclose(n @ self.xi @ np.linalg.inv(n) - self.xi, T, atol=1e-12)
        assert_allclose(np.diag(n), np.ones(3), atol=1e-15)

    def test_point_has_unitary_factor_k(self):
        """Test the Iwasawa unitary factor of l(k, rho') is k"""
        k = random_special_unitary(3, self.rng)
        rho_p = project_complement(self.xi, random_su(3, self.rng))
        l = point_from_momentum(k, rho_p, self.xi, 0.6)
        assert_allclose(iwasawa_decompose(l).g, k, atol=1e-12)
        self.assertAlmostEqual(abs(np.linalg.det(l.l) - 1), 0.0, places=12)


class TestSuites(unittest.TestCase):
    """Test the general second order form and its closed forms"""

    def _assert_passed(self, report):
        self.assertTrue(report.passed, report.model_dump())

    def test_biyb_su2(self):
        """Test the SU(2) model with both deformations"""
        self._assert_passed(biyb_suite(2, 0.5, 0.3, samples=5, seed=1))

    def test_biyb_su3(self):
        """Test the SU(3) model with a regular xi"""
        self._assert_passed(biyb_suite(3, 0.7, 0.3, samples=3, seed=2))

    def test_su2_closed_forms(self):
        """Test the sphere and spherical-coordinate forms"""
        self._assert_passed(biyb_su2_suite(0.5, 0.3, samples=10, seed=3))
        self._assert_passed(biyb_su2_suite(1.2, 0.0, samples=10, seed=4))

    def test_yb_cpn(self):
        """Test the Yang-Baxter CP^N chart and global forms"""
        for N in (1, 2):
            with self.subTest(N=N):
                self._assert_passed(yb_cpn_suite(N, 0.4, samples=5, seed=N))

    def test_sphere_and_spherical_agree(self):
        """Test both closed forms describe the same function"""
        theta, phi = 0.8, 2.1
        x = np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
        xdot = np.cross([0.2, -0.7, 0.4], x)
        coords = spherical_coordinates(x, xdot)
        self.assertAlmostEqual(coords[0], theta, places=12)
        self.assertAlmostEqual(su2_closed_form(x, xdot, 0.6, 0.25),
                               su2_closed_form_spherical(*coords, 0.6, 0.25), places=12)


if __name__ == "__main__":
    unittest.main()
