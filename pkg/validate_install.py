"""
Simple validation script to test basic imports and configuration.
"""
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

print("=" * 60)
print("INSTALLATION CHECK")
print("=" * 60)

# Test 1: Check dependencies
try:
    import numpy
    import scipy
    import pandas
    import pydantic
    import pydantic_settings
    import loguru
    import tomli
    print("[OK] All main dependencies installed")
except ImportError as e:
    print(f"[ERROR] Missing dependency: {e}")
    sys.exit(1)

# Test 2: Import packages
try:
    from models import Settings, ExperimentConfig
    from core.orchestrator import ExperimentOrchestrator
    from utils import ReportWriter
    print("[OK] Packages imported")
except Exception as e:
    print(f"[ERROR] Import failed: {e}")
    sys.exit(1)

# Test 3: Load settings
try:
    config_dir = Path(__file__).parent / "config"
    settings = Settings.load_from_toml(config_dir / "settings.toml")
    print(f"[OK] Settings loaded: dt={settings.integration.dt}, samples={settings.sampling.samples}")
except Exception as e:
    print(f"[ERROR] Could not load settings: {e}")
    sys.exit(1)

# Test 4: Parse the example experiments
try:
    examples = sorted((config_dir / "examples").glob("*.cfg"))
    for path in examples:
        ExperimentConfig.load(path)
    print(f"[OK] {len(examples)} example experiments parsed")
except Exception as e:
    print(f"[ERROR] Example experiment invalid: {e}")
    sys.exit(1)

print("\n" + "=" * 60)
print("RESULT: installation OK")
print("=" * 60)
print("\nNext steps:")
print("1. Run an experiment: python run.py verify --model pcm --N 3 --seed 7")
print("2. Run the example batch: python run.py --batch config/examples/batch.txt")
print("3. Run the tests: python -m unittest discover tests -v")
