"""
CSV and JSON report writers.
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Sequence

import numpy as np
import pandas as pd
from loguru import logger

from core.dynamics import ModelSpec, Trajectory, lambda_label


class ReportWriter:
    """Writes trajectory tables and JSON reports into one output directory"""

    def __init__(self, output_dir: Path, float_digits: int = 17):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.float_format = f"%.{float_digits}g"

    @staticmethod
    def _state_columns(spec: ModelSpec, trajectory: Trajectory) -> Dict[str, List[float]]:
        """Flattened real and imaginary parts of the packed group points"""
        packed = np.array([spec.double.pack(point) for point in trajectory.points])
        columns: Dict[str, List[float]] = {}
        for index in range(packed.shape[1]):
            column = packed[:, index]
            if np.iscomplexobj(column):
                columns[f"re_y{index}"] = column.real
                columns[f"im_y{index}"] = column.imag
            else:
                columns[f"y{index}"] = column
        return columns

    def trajectory_frame(self, spec: ModelSpec, trajectory: Trajectory,
                         lambdas: Sequence[complex] = ()) -> pd.DataFrame:
        """
        Columns: t, state columns, H, drift, then reL_inv_k@lambda and
        imL_inv_k@lambda for every monitored lambda and k in (2, 3).
        """
        H = np.asarray(trajectory.hamiltonian, dtype=float)
        scale = abs(H[0]) if abs(H[0]) > 1e-300 else 1.0
        data: Dict[str, Any] = {"t": trajectory.times}
        data.update(self._state_columns(spec, trajectory))
        data["H"] = H
        data["drift"] = (H - H[0]) / scale
        for lam in lambdas:
            label = lambda_label(lam)
            for power in (2, 3):
                series = trajectory.invariants.get((complex(lam), power))
                if series is None:
                    continue
                data[f"reL_inv_{power}@{label}"] = np.real(series)
                data[f"imL_inv_{power}@{label}"] = np.imag(series)
        return pd.DataFrame(data)

    def write_trajectory_csv(self, spec: ModelSpec, trajectory: Trajectory,
                             lambdas: Sequence[complex] = (), filename: str = "trajectory.csv") -> Path:
        """UTF-8, LF line endings, comma separated, 17 significant digits"""
        output_file = self.output_dir / filename
        frame = self.trajectory_frame(spec, trajectory, lambdas)
        frame.to_csv(output_file, index=False, float_format=self.float_format,
                     encoding="utf-8", lineterminator="\n")
        logger.info(f"Trajectory table written: {output_file} ({len(frame)} rows)")
        return output_file

    def write_json(self, name: str, payload: Dict[str, Any]) -> Path:
        """Stable key order, two-space indent, trailing newline"""
        output_file = self.output_dir / (name if name.endswith(".json") else f"{name}.json")
        text = json.dumps(payload, indent=2, sort_keys=True, default=_json_default)
        output_file.write_text(text + "\n", encoding="utf-8", newline="\n")
        logger.info(f"Report written: {output_file}")
        return output_file


def _json_default(value: Any) -> Any:
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")
