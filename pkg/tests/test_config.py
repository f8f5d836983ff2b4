"""
Unit tests for settings and experiment configuration.
"""
import os
import tempfile
import unittest
from pathlib import Path
from unittest import mock
import sys

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from core.errors import ConfigError, DomainError
from models import Command, EnvironmentSettings, ExperimentConfig, ModelKind, Scheme, Settings, XiPreset
from models.config import parse_complex, format_complex, step_count


PROJECT_ROOT = Path(__file__).parent.parent

SAMPLE = """
# principal chiral model, quick check
name = pcm-quick
command = verify
model = pcm
N = 3
samples = 20   # small
seed = 7
lambdas = 0.3, 0.7i, -0.5+0.2i
tolerance.identity = 1e-11
"""


class TestComplexNumbers(unittest.TestCase):
    """Test the 'a+bi' notation"""

    def test_parse(self):
        """Test real, imaginary, mixed and exponent forms"""
        cases = {
            "0.3": 0.3,
            "0.7i": 0.7j,
            "-0.5+0.2i": -0.5 + 0.2j,
            "i": 1j,
            "-i": -1j,
            "1e-3-2e-1i": 1e-3 - 0.2j,
            "2j": 2j,
            " 1 + 2i ": 1 + 2j,
        }
        for text, expected in cases.items():
            with self.subTest(text=text):
                self.assertEqual(parse_complex(text), expected)

    def test_parse_rejects_garbage(self):
        """Test unparseable text is a ConfigError on lambdas"""
        with self.assertRaises(ConfigError) as ctx:
            parse_complex("1+2k")
        self.assertEqual(ctx.exception.field, "lambdas")

    def test_format(self):
        """Test rendering keeps the notation"""
        self.assertEqual(format_complex(1 - 2j), "1.0-2.0i")
        self.assertEqual(format_complex(0.7j), "0.7i")
        self.assertEqual(format_complex(0.3), "0.3")


class TestExperimentConfig(unittest.TestCase):
    """Test parsing, validation and serialization"""

    def test_parse(self):
        """Test comments, enums, lambdas and tolerances"""
        config = ExperimentConfig.parse(SAMPLE)
        self.assertEqual(config.name, "pcm-quick")
        self.assertEqual(config.command, Command.VERIFY)
        self.assertEqual(config.model, ModelKind.PCM)
        self.assertEqual(config.N, 3)
        self.assertEqual(config.samples, 20)
        self.assertEqual(config.seed, 7)
        self.assertEqual(config.lambdas, [0.3 + 0j, 0.7j, -0.5 + 0.2j])
        self.assertEqual(config.tolerance("identity", 1e-10), 1e-11)
        self.assertEqual(config.tolerance("drift", 1e-8), 1e-8)

    def test_serialize_round_trip(self):
        """Test serialize parses back to an equal config"""
        config = ExperimentConfig.parse(SAMPLE)
        self.assertEqual(ExperimentConfig.parse(config.serialize()), config)

        adaptive = ExperimentConfig.build({"command": "simulate", "model": "biyb-su3", "eta": 0.7,
                                           "mu": 0.0, "scheme": "adaptive", "dt": 0.05})
        self.assertEqual(ExperimentConfig.parse(adaptive.serialize()), adaptive)

    def test_overrides_win(self):
        """Test non-None overrides replace file values"""
        config = ExperimentConfig.parse(SAMPLE, overrides={"N": 4, "seed": None})
        self.assertEqual(config.N, 4)
        self.assertEqual(config.seed, 7)
        merged = config.merged({"samples": 5, "scheme": "adaptive"})
        self.assertEqual(merged.samples, 5)
        self.assertEqual(merged.scheme, Scheme.ADAPTIVE)

    def test_field_errors(self):
        """Test every invalid value names its field"""
        base = {"command": "simulate", "model": "biyb-su2"}
        cases = [
            ({"dt": 0}, "dt"),
            ({"t_end": 1.0, "dt": 0.3}, "t_end"),
            ({"eta": 0.0}, "eta"),
            ({"mu": -1.0}, "mu"),
            ({"lambdas": "0.3, bogus"}, "lambdas"),
            ({"model": "cpn", "xi_preset": "cartan-regular"}, "xi_preset"),
            ({"model": "pcm", "N": 1}, "N"),
            ({"model": "pendulum", "lambdas": "1"}, "lambdas"),
            ({"tolerances": {"drift": -1.0}}, "tolerance.drift"),
        ]
        for extra, field in cases:
            with self.subTest(field=field):
                with self.assertRaises(ConfigError) as ctx:
                    ExperimentConfig.build({**base, **extra})
                self.assertEqual(ctx.exception.field, field)

    def test_step_count(self):
        """Test t_end must be a whole number of steps dt"""
        self.assertEqual(step_count(10.0, 1e-3), 10000)
        self.assertEqual(step_count(0.05, 1e-3), 50)
        self.assertEqual(step_count(0.5, 0.05), 10)
        for t_end, dt in ((1.0, 0.3), (0.105, 0.01), (1e-4, 1e-3), (1.0, 0.0)):
            with self.subTest(t_end=t_end, dt=dt):
                with self.assertRaises(DomainError):
                    step_count(t_end, dt)

    def test_unknown_key(self):
        """Test an unknown key in the file is rejected"""
        with self.assertRaises(ConfigError) as ctx:
            ExperimentConfig.parse("command = verify\nmodel = pcm\ncolour = red\n")
        self.assertEqual(ctx.exception.field, "colour")

    def test_malformed_line(self):
        """Test a line without '=' reports its number"""
        with self.assertRaises(ConfigError) as ctx:
            ExperimentConfig.parse_pairs("command = verify\nnonsense\n")
        self.assertEqual(ctx.exception.field, "line 2")

    def test_cpn_accepts_block_preset(self):
        """Test the cpn block preset is accepted for cpn"""
        config = ExperimentConfig.build({"command": "reduce", "model": "cpn", "xi_preset": "cpn-block"})
        self.assertEqual(config.xi_preset, XiPreset.CPN_BLOCK)

    def test_load_missing_file(self):
        """Test a missing file is a ConfigError"""
        with self.assertRaises(ConfigError):
            ExperimentConfig.load(Path("does/not/exist.cfg"))


class TestSeedResolution(unittest.TestCase):
    """Test config, then EMODEL_SEED, then settings"""

    def setUp(self):
        self.settings = Settings()
        self.settings.sampling.seed = 5

    def test_config_seed_wins(self):
        """Test an explicit seed beats the environment"""
        config = ExperimentConfig.build({"command": "verify", "model": "pcm", "seed": 1})
        self.assertEqual(config.resolve_seed(EnvironmentSettings(emodel_seed=9), self.settings), 1)

    def test_environment_then_settings(self):
        """Test EMODEL_SEED is used before the settings default"""
        config = ExperimentConfig.build({"command": "verify", "model": "pcm"})
        with mock.patch.dict(os.environ, {"EMODEL_SEED": "42"}):
            self.assertEqual(config.resolve_seed(EnvironmentSettings(), self.settings), 42)
        self.assertEqual(config.resolve_seed(EnvironmentSettings(emodel_seed=None), self.settings), 5)
        self.assertEqual(config.resolve_seed(), 0)


class TestSettings(unittest.TestCase):
    """Test settings.toml loading"""

    def test_repository_settings(self):
        """Test the shipped settings carry the default tolerances"""
        settings = Settings.load_from_toml(PROJECT_ROOT / "config" / "settings.toml")
        self.assertEqual(settings.numerics.structural_tol, 1e-12)
        self.assertEqual(settings.numerics.identity_tol, 1e-10)
        self.assertEqual(settings.numerics.finite_difference_tol, 1e-6)
        self.assertEqual(settings.numerics.closed_form_tol, 1e-9)
        self.assertEqual(settings.numerics.drift_tol, 1e-8)
        self.assertEqual(settings.integration.scheme, Scheme.RK4)
        self.assertEqual(settings.sampling.lambdas, ["0.3", "0.7i", "-0.5+0.2i"])

    def test_missing_file_falls_back(self):
        """Test an unreadable file yields defaults"""
        with tempfile.TemporaryDirectory() as tmp:
            settings = Settings.load_from_toml(Path(tmp) / "missing.toml")
        self.assertEqual(settings, Settings())


if __name__ == "__main__":
    unittest.main()
