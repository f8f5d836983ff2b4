"""
Unit tests for the model catalogue.
"""
import unittest
from pathlib import Path
import sys

import numpy as np
from numpy.testing import assert_allclose

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from core.algebra import is_su
from core.catalogue import build_model, group_size, xi_from_preset
from core.dynamics import current_of, hamiltonian
from core.errors import ConfigError
from models import ModelKind, XiPreset


class TestGroupSize(unittest.TestCase):
    """Test the matrix size behind every catalogue entry"""

    def test_sizes(self):
        """Test fixed-size entries ignore N and CP^N entries use N + 1"""
        self.assertEqual(group_size(ModelKind.PENDULUM, 5), 2)
        self.assertEqual(group_size(ModelKind.BIYB_SU2, 5), 2)
        self.assertEqual(group_size(ModelKind.BIYB_SU3, 5), 3)
        self.assertEqual(group_size(ModelKind.CPN, 2), 3)
        self.assertEqual(group_size(ModelKind.YB_CPN, 1), 2)
        self.assertEqual(group_size(ModelKind.PCM, 4), 4)

    def test_xi_presets(self):
        """Test both presets give elements of su(n)"""
        regular = xi_from_preset(XiPreset.CARTAN_REGULAR, 3)
        assert_allclose(np.diag(regular), 1j * np.array([2.0, 0.0, -2.0]))
        block = xi_from_preset(XiPreset.CPN_BLOCK, 3)
        assert_allclose(np.diag(block), 1j * np.array([1.0, 1.0, -2.0]))
        self.assertTrue(is_su(regular))
        self.assertTrue(is_su(block))


class TestBuildModel(unittest.TestCase):
    """Test presets for every model"""

    def test_every_model_builds(self):
        """Test every entry yields a finite, positive energy"""
        for model in ModelKind:
            with self.subTest(model=model.value):
                preset = build_model(model, N=2, seed=3)
                self.assertEqual(preset.model, model)
                H = hamiltonian(current_of(preset.l0, preset.spec), preset.spec)
                self.assertTrue(np.isfinite(H))
                self.assertGreater(H, 0.0)

    def test_cpn_uses_n_plus_one(self):
        """Test CP^2 lives on SU(3)"""
        preset = build_model(ModelKind.CPN, N=2, seed=0)
        self.assertEqual(preset.spec.xi_matrix.shape, (3, 3))

    def test_deterministic(self):
        """Test equal seeds give equal initial points"""
        first = build_model(ModelKind.PCM, N=3, seed=11)
        second = build_model(ModelKind.PCM, N=3, seed=11)
        assert_allclose(first.spec.double.pack(first.l0), second.spec.double.pack(second.l0))

    def test_rejects_small_group(self):
        """Test the principal chiral model on SU(1)"""
        with self.assertRaises(ConfigError) as ctx:
            build_model(ModelKind.PCM, N=1)
        self.assertEqual(ctx.exception.field, "N")

    def test_rejects_cartan_preset_for_cpn(self):
        """Test the CP^N models insist on the block preset"""
        with self.assertRaises(ConfigError) as ctx:
            build_model(ModelKind.YB_CPN, N=2, xi_preset=XiPreset.CARTAN_REGULAR)
        self.assertEqual(ctx.exception.field, "xi_preset")

    def test_rejects_deformation_parameters(self):
        """Test eta <= 0 and mu < 0 for deformed models"""
        with self.assertRaises(ConfigError) as ctx:
            build_model(ModelKind.BIYB_SU2, eta=0.0)
        self.assertEqual(ctx.exception.field, "eta")
        with self.assertRaises(ConfigError) as ctx:
            build_model(ModelKind.BIYB_SU3, mu=-0.1)
        self.assertEqual(ctx.exception.field, "mu")


if __name__ == "__main__":
    unittest.main()
