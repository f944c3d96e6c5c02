"""
Output files of a run: path and histogram CSVs, JSON reports and the run
manifest. Nothing time-dependent is written, so reruns are byte-identical.
"""

import json
import math
import platform
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np
import pandas as pd
import pydantic
import scipy
from loguru import logger
from pydantic import BaseModel

import src
from src.config import get_output_files
from src.models.reports import ExponentHistogram, RunManifest


def json_safe(value: Any) -> Any:
    """Replaces non-finite floats with None, recursively."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {key: json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(item) for item in value]
    return value


def package_versions() -> Dict[str, str]:
    return {
        "cascade-toolkit": src.__version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
        "pydantic": pydantic.VERSION,
    }


class RunWriter:
    """Writes the files of one run into `out_dir`, tagged with hash and seed."""

    def __init__(self, out_dir: Union[str, Path], config_hash: str, seed: int):
        self.out_dir = Path(out_dir)
        self.config_hash = config_hash
        self.seed = seed
        self.names = get_output_files()
        self.files: List[str] = []
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def _record(self, name: str) -> Path:
        if name not in self.files:
            self.files.append(name)
        return self.out_dir / name

    def write_csv(self, name: str, frame: pd.DataFrame) -> Path:
        """One `# config_hash=...,seed=...` line, then the frame with shortest round-trip floats."""
        path = self._record(name)
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(f"# config_hash={self.config_hash},seed={self.seed}\n")
            frame.to_csv(handle, index=False, lineterminator="\n")
        logger.debug(f"Wrote {len(frame)} rows to {path}")
        return path

    def write_json(self, name: str, payload: Union[BaseModel, Dict[str, Any]]) -> Path:
        if isinstance(payload, BaseModel):
            payload = payload.model_dump(mode="json")
        path = self._record(name)
        text = json.dumps(json_safe(payload), indent=2, allow_nan=False)
        path.write_text(text + "\n", encoding="utf-8")
        logger.debug(f"Wrote {path}")
        return path

    def write_path(self, n: int, ts: np.ndarray, values: np.ndarray) -> Path:
        frame = pd.DataFrame({
            "t": np.asarray(ts, dtype=float),
            "re_F": np.asarray(values).real,
            "im_F": np.asarray(values).imag,
            "n": np.full(len(ts), n, dtype=int),
        })
        return self.write_csv(self.names["paths"].format(n=n), frame)

    def write_histogram(self, histogram: ExponentHistogram) -> Path:
        """Counts per h bin; the zero-oscillation bucket is the `inf` row."""
        frame = pd.DataFrame({
            "n": [histogram.n] * (len(histogram.h_bins) + 1),
            "h_bin": list(histogram.h_bins) + [math.inf],
            "count": list(histogram.counts) + [histogram.infinite_count],
        })
        return self.write_csv(self.names["histogram"].format(n=histogram.n), frame)

    def write_report(self, key: str, report: BaseModel) -> Path:
        return self.write_json(self.names[key], report)

    def write_manifest(self, command: str, config: Dict[str, Any]) -> Path:
        manifest_name = self.names["manifest"]
        manifest = RunManifest(
            config_hash=self.config_hash,
            seed=self.seed,
            command=command,
            files=[name for name in self.files if name != manifest_name],
            versions=package_versions(),
            config=config,
        )
        return self.write_json(manifest_name, manifest)
