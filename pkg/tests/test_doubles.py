"""
Unit tests for the Drinfel'd doubles and the E-operators.
"""
import unittest
from pathlib import Path
import sys

import numpy as np
from numpy.testing import assert_allclose
from scipy.linalg import expm

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from core.algebra import ComplexifiedElement, TStarElement, dagger, form_tstar, random_sl, random_su, sl_basis
from core.doubles import (
    EOperator,
    LuWeinsteinDouble,
    SLPoint,
    TStarDouble,
    TStarPoint,
    e_biyb,
    e_gram,
    e_tstar,
    iwasawa_decompose,
    split_signature,
    tstar_adjoint,
    tstar_basis,
    tstar_multiply,
)
from core.errors import DomainError, SingularOperatorError


class TestTStarDouble(unittest.TestCase):
    """Test the group and algebra of T*SU(N)"""

    def setUp(self):
        self.rng = np.random.default_rng(21)
        self.D = TStarDouble(3)

    def _close(self, p, q):
        assert_allclose(p.k, q.k, atol=1e-12)
        assert_allclose(p.kappa, q.kappa, atol=1e-12)

    def test_multiplication_associative(self):
        """Test (pq)r = p(qr)"""
        p, q, r = (self.D.random_point(self.rng) for _ in range(3))
        self._close(self.D.multiply(self.D.multiply(p, q), r), self.D.multiply(p, self.D.multiply(q, r)))

    def test_inverse(self):
        """Test p p^-1 = 1"""
        p = self.D.random_point(self.rng)
        self._close(self.D.multiply(p, self.D.inverse(p)), self.D.identity())

    def test_compact_times_abelian(self):
        """Test (k, 0)(1, rho) = (k, Ad_k rho)"""
        k = self.D.random_point(self.rng).k
        rho = random_su(3, self.rng)
        out = tstar_multiply(TStarPoint(k, np.zeros((3, 3), dtype=complex)), TStarPoint(np.eye(3, dtype=complex), rho))
        self._close(out, TStarPoint(k, k @ rho @ dagger(k)))

    def test_adjoint_of_abelian_factor(self):
        """Test Ad_{(1, kappa)}(mu, nu) = (mu, nu + [kappa, mu])"""
        kappa, mu, nu = (random_su(3, self.rng) for _ in range(3))
        out = tstar_adjoint(TStarPoint(np.eye(3, dtype=complex), kappa), TStarElement(mu, nu))
        assert_allclose(out.first, mu, atol=1e-14)
        assert_allclose(out.second, nu + kappa @ mu - mu @ kappa, atol=1e-14)

    def test_adjoint_is_a_homomorphism(self):
        """Test Ad_{pq} = Ad_p Ad_q"""
        p, q = self.D.random_point(self.rng), self.D.random_point(self.rng)
        x = self.D.random_element(self.rng)
        lhs = self.D.adjoint(self.D.multiply(p, q), x)
        rhs = self.D.adjoint(p, self.D.adjoint(q, x))
        self.assertLess((lhs - rhs).norm(), 1e-12)

    def test_form_invariant(self):
        """Test (Ad_p x, Ad_p y) = (x, y)"""
        p = self.D.random_point(self.rng)
        x, y = self.D.random_element(self.rng), self.D.random_element(self.rng)
        self.assertAlmostEqual(self.D.form(self.D.adjoint(p, x), self.D.adjoint(p, y)), self.D.form(x, y), places=11)

    def test_halves_isotropic(self):
        """Test (mu, 0) and (0, nu) both span isotropic subspaces"""
        zero = np.zeros((3, 3), dtype=complex)
        a, b = random_su(3, self.rng), random_su(3, self.rng)
        self.assertEqual(form_tstar(TStarElement(a, zero), TStarElement(b, zero)), 0.0)
        self.assertEqual(form_tstar(TStarElement(zero, a), TStarElement(zero, b)), 0.0)

    def test_exp_of_each_half(self):
        """Test exp(mu, 0) = (e^mu, 0) and exp(0, nu) = (1, nu)"""
        zero = np.zeros((3, 3), dtype=complex)
        mu, nu = random_su(3, self.rng), random_su(3, self.rng)
        p = self.D.exp(TStarElement(mu, zero))
        assert_allclose(p.k, expm(mu), atol=1e-12)
        assert_allclose(p.kappa, zero, atol=1e-12)
        q = self.D.exp(TStarElement(zero, nu))
        assert_allclose(q.k, np.eye(3), atol=1e-12)
        assert_allclose(q.kappa, nu, atol=1e-12)

    def test_split_signature(self):
        """Test the form has signature (N^2-1, N^2-1)"""
        self.assertEqual(split_signature(tstar_basis(3)), (8, 8))

    def test_rejects_small_n(self):
        """Test N < 2 is a DomainError"""
        with self.assertRaises(DomainError):
            TStarDouble(1)


class TestLuWeinsteinDouble(unittest.TestCase):
    """Test SL(N, C) with the imaginary-part form"""

    def setUp(self):
        self.rng = np.random.default_rng(8)

    def test_iwasawa_factors(self):
        """Test l = g a n with g special unitary, a positive diagonal, n unit upper triangular"""
        l = expm(random_sl(3, self.rng))
        f = iwasawa_decompose(SLPoint(l))
        assert_allclose(f.compose(), l, atol=1e-12)
        assert_allclose(f.g @ dagger(f.g), np.eye(3), atol=1e-12)
        self.assertAlmostEqual(abs(np.linalg.det(f.g) - 1), 0.0, places=10)
        self.assertTrue(np.all(np.diag(f.a).real > 0))
        assert_allclose(np.diag(f.n), np.ones(3), atol=1e-14)
        assert_allclose(np.tril(f.n, -1), np.zeros((3, 3)), atol=1e-14)

    def test_iwasawa_singular(self):
        """Test a singular matrix is rejected"""
        with self.assertRaises(SingularOperatorError):
            iwasawa_decompose(np.zeros((2, 2), dtype=complex))

    def test_split_signature(self):
        """Test the form has signature (N^2-1, N^2-1)"""
        self.assertEqual(split_signature(sl_basis(2, 0.5)), (3, 3))

    def test_rejects_non_positive_eta(self):
        """Test eta <= 0 is a DomainError"""
        with self.assertRaises(DomainError):
            LuWeinsteinDouble(2, 0.0)

    def test_adjoint_invariance(self):
        """Test (Ad_l X, Ad_l Y) = (X, Y)"""
        D = LuWeinsteinDouble(3, 0.7)
        p = D.random_point(self.rng)
        X, Y = D.random_element(self.rng), D.random_element(self.rng)
        self.assertAlmostEqual(D.form(D.adjoint(p, X), D.adjoint(p, Y)), D.form(X, Y), places=10)

    def test_complexified_operations(self):
        """Test the pairing and bracket extend complex-bilinearly, apart from the matrix i"""
        D = LuWeinsteinDouble(2, 0.5)
        X, Y, Z = (D.random_element(self.rng) for _ in range(3))
        c = 0.3 + 0.8j
        cX = ComplexifiedElement.lift(X) * c
        self.assertAlmostEqual(D.pairing(cX, Y), c * D.form(X, Y), places=12)
        self.assertAlmostEqual(D.pairing(X, Y), D.form(X, Y), places=14)
        # c acts on the pair, so c X differs from the matrix product c * X
        self.assertGreater(abs(D.pairing(cX, Y) - D.pairing(c * X, Y)), 1e-6)
        B = D.bracket(cX, ComplexifiedElement(Y, Z))
        assert_allclose(B.real, 0.3 * (X @ Y - Y @ X) - 0.8 * (X @ Z - Z @ X), atol=1e-13)
        assert_allclose(B.imag, 0.3 * (X @ Z - Z @ X) + 0.8 * (X @ Y - Y @ X), atol=1e-13)


class TestEOperators(unittest.TestCase):
    """Test E is involutive, symmetric and positive"""

    CASES = [
        (TStarDouble(2), EOperator.tstar(2)),
        (TStarDouble(3), EOperator.tstar(3)),
        (LuWeinsteinDouble(2, 0.5), EOperator.biyb(2, 0.5, 0.3)),
        (LuWeinsteinDouble(2, 1.0), EOperator.biyb(2, 1.0, 0.0)),
        (LuWeinsteinDouble(3, 0.7), EOperator.biyb(3, 0.7, 0.3)),
    ]

    def test_involution(self):
        """Test E^2 = Id"""
        for _, e_op in self.CASES:
            with self.subTest(e_op=e_op):
                m = e_op.as_map.matrix
                assert_allclose(m @ m, np.eye(m.shape[0]), atol=1e-10)

    def test_symmetric_positive(self):
        """Test (x, E y) is a symmetric positive-definite Gram matrix"""
        for double, e_op in self.CASES:
            with self.subTest(e_op=e_op):
                gram = e_gram(e_op, double)
                assert_allclose(gram, gram.T, atol=1e-10)
                self.assertGreater(np.min(np.linalg.eigvalsh(0.5 * (gram + gram.T))), 0.0)

    def test_flip(self):
        """Test E(mu, nu) = (-nu, -mu)"""
        a, b = random_su(2, np.random.default_rng(0)), random_su(2, np.random.default_rng(1))
        out = e_tstar(TStarElement(a, b))
        assert_allclose(out.first, -b)
        assert_allclose(out.second, -a)

    def test_biyb_undeformed_on_su(self):
        """Test E_{eta,0} X = i eta X on su(N)"""
        X = random_su(3, np.random.default_rng(4))
        assert_allclose(EOperator.biyb(3, 0.4, 0.0)(X), 0.4j * X, atol=1e-14)

    def test_biyb_without_second_deformation(self):
        """Test E_{eta,0} on sl(N, C) mixes X and X^dagger with fixed coefficients"""
        X = random_sl(3, np.random.default_rng(9))
        for eta in (0.5, 1.0, 2.0):
            with self.subTest(eta=eta):
                expected = 0.5j * (eta ** 2 - 1) / eta * X - 0.5j * (eta ** 2 + 1) / eta * dagger(X)
                assert_allclose(e_biyb(X, eta, 0.0), expected, atol=1e-13)

    def test_invalid_parameters(self):
        """Test eta <= 0 and mu < 0 are rejected"""
        with self.assertRaises(DomainError):
            EOperator.biyb(2, 0.0, 0.1)
        with self.assertRaises(DomainError):
            EOperator.biyb(2, 0.5, -0.1)


if __name__ == "__main__":
    unittest.main()
