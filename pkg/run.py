"""
emodel-lab - Launcher Script

This script properly configures the Python path and runs the command line.
Use this instead of running src/main.py directly to avoid import issues.

Usage:
    python run.py verify --model pcm --N 3 --samples 200 --seed 7
    python run.py simulate --model pendulum --t-end 10 --dt 1e-3
    python run.py appendix --eta 0.7 --mu 0.3 --samples 50
    python run.py --batch config/examples/batch.txt
"""
import sys
from pathlib import Path

# Add src directory to Python path
project_root = Path(__file__).parent
src_path = project_root / "src"
sys.path.insert(0, str(src_path))

from loguru import logger

from main import main


if __name__ == "__main__":
    try:
        sys.exit(main())
    except Exception as e:
        logger.exception(f"Application error: {e}")
        sys.exit(3)
