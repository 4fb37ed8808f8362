"""
Dataset output: CSV curves with a JSON manifest sidecar, or JSON documents
with the manifest embedded.
"""

import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..core.params import Scenario, scenario_to_dict
from ..utils.config import get_config
from ..utils.logger import LoggerMixin

OUTPUT_FORMATS = ("csv", "json")


def _tool_version() -> str:
    from .. import __version__

    return __version__


@dataclass
class RunManifest:
    """Everything needed to rerun the command that produced a dataset."""

    scenario: Dict[str, Any]
    engines: List[str]
    sweep_axis: str
    sweep_values: List[float]
    seed: Optional[int] = None
    tolerances: Dict[str, Any] = field(default_factory=dict)
    tool_version: str = field(default_factory=_tool_version)
    wall_clock_s: float = 0.0
    command: Optional[str] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def for_run(
        cls,
        scenario: Scenario,
        engines: Sequence[str],
        sweep_axis: str,
        sweep_values: Sequence[float],
        **kwargs: Any,
    ) -> "RunManifest":
        return cls(
            scenario=scenario_to_dict(scenario),
            engines=list(engines),
            sweep_axis=sweep_axis,
            sweep_values=[float(v) for v in sweep_values],
            **kwargs,
        )

    def to_dict(self) -> Dict[str, Any]:
        return _jsonable(asdict(self))


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def manifest_path(path: Path) -> Path:
    return path.with_name(path.name + ".manifest.json")


class DatasetWriter(LoggerMixin):
    def __init__(self, float_format: Optional[str] = None, sidecar: Optional[bool] = None):
        super().__init__()
        self.config = get_config()
        self.float_format = float_format or self.config.output.float_format
        self.sidecar = self.config.output.manifest_sidecar if sidecar is None else sidecar

    def frame_to_csv(self, frame: pd.DataFrame) -> str:
        return frame.to_csv(index=False, float_format=self.float_format, lineterminator="\n")

    def write_frame(
        self,
        frame: pd.DataFrame,
        path: Path,
        manifest: RunManifest,
        fmt: str = "csv",
    ) -> Path:
        """Write one dataset and its manifest; returns the dataset path."""
        if fmt not in OUTPUT_FORMATS:
            raise ValueError(f"Unknown output format: {fmt}")
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)

        try:
            if fmt == "csv":
                path.write_text(self.frame_to_csv(frame), encoding="utf-8")
                if self.sidecar:
                    self.write_json(manifest.to_dict(), manifest_path(path))
            else:
                records = json.loads(
                    frame.to_json(orient="records", double_precision=6)
                )
                self.write_json({"manifest": manifest.to_dict(), "data": records}, path)
        except OSError as e:
            self.log_error(f"Failed to write dataset {path}: {e}")
            raise

        self.log_info(f"Wrote {len(frame)} rows to {path}")
        return path

    def write_json(self, document: Dict[str, Any], path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(_jsonable(document), f, indent=2, sort_keys=False)
            f.write("\n")
        return path


class Stopwatch:
    def __init__(self):
        self.start = time.perf_counter()

    @property
    def elapsed(self) -> float:
        return round(time.perf_counter() - self.start, 3)
