"""
File handling utilities for experiment configs, batch lists and output directories.
"""
import re
from pathlib import Path
from typing import List, Tuple

from loguru import logger

from core.errors import ConfigError


class FileValidator:
    """Validates experiment and batch files"""

    CONFIG_SUFFIXES = (".cfg", ".conf", ".txt")

    @staticmethod
    def validate_file(file_path: Path) -> Tuple[bool, str]:
        """
        Validate if a path is a readable experiment file.
        Returns (is_valid, reason)
        """
        if not file_path.exists():
            return False, "File does not exist"

        if not file_path.is_file():
            return False, "Not a file"

        if file_path.suffix.lower() not in FileValidator.CONFIG_SUFFIXES:
            return False, f"Unsupported file type {file_path.suffix or '(none)'}"

        try:
            file_path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as e:
            return False, f"Unreadable: {e}"

        return True, "OK"


class FileHandler:
    """Resolves batch lists and per-experiment output directories"""

    @staticmethod
    def read_batch(batch_path: Path) -> List[Path]:
        """
        Config paths listed in a batch file, one per line, relative to the batch
        file's directory. Blank lines and '#' comments are skipped.

        Raises:
            ConfigError: if the batch file or a listed config is invalid
        """
        batch_path = Path(batch_path)
        try:
            lines = batch_path.read_text(encoding="utf-8").splitlines()
        except OSError as e:
            raise ConfigError("batch", f"cannot read {batch_path}: {e}")

        configs = []
        for raw in lines:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            path = Path(line)
            if not path.is_absolute():
                path = batch_path.parent / path
            is_valid, reason = FileValidator.validate_file(path)
            if not is_valid:
                raise ConfigError("batch", f"{path}: {reason}")
            configs.append(path)

        if not configs:
            raise ConfigError("batch", f"{batch_path} lists no experiment files")
        logger.info(f"Batch {batch_path.name}: {len(configs)} experiments")
        return configs

    @staticmethod
    def safe_name(name: str) -> str:
        """Directory-safe experiment name"""
        cleaned = re.sub(r"[^A-Za-z0-9_.-]+", "_", name.strip()).strip("._")
        return cleaned or "experiment"

    @staticmethod
    def experiment_dir(output_root: Path, name: str) -> Path:
        """Create and return <output_root>/<name>"""
        path = Path(output_root) / FileHandler.safe_name(name)
        path.mkdir(parents=True, exist_ok=True)
        return path

    @staticmethod
    def unique_names(names: List[str]) -> List[str]:
        """Suffix repeated experiment names so every experiment owns its directory"""
        seen = {}
        result = []
        for name in names:
            base = FileHandler.safe_name(name)
            count = seen.get(base, 0)
            seen[base] = count + 1
            result.append(base if count == 0 else f"{base}_{count + 1}")
        return result
