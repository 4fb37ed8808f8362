from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence

import numpy as np
import pandas as pd

PROVENANCES = ("analytic", "monte-carlo")


@dataclass
class CoverageCurve:
    """Coverage probability over an SINR-threshold grid (dB)."""

    gamma_grid: np.ndarray
    values: np.ndarray
    provenance: str
    ci_halfwidth: Optional[np.ndarray] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.gamma_grid = np.asarray(self.gamma_grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.provenance not in PROVENANCES:
            raise ValueError(f"Unknown curve provenance: {self.provenance}")
        if self.gamma_grid.shape != self.values.shape:
            raise ValueError("gamma_grid and values must have the same length")
        if np.any(self.values < 0) or np.any(self.values > 1):
            raise ValueError("Coverage values must lie in [0, 1]")
        if self.ci_halfwidth is not None:
            self.ci_halfwidth = np.asarray(self.ci_halfwidth, dtype=float)

    def is_nonincreasing(self, tol: float = 1e-9) -> bool:
        order = np.argsort(self.gamma_grid)
        return bool(np.all(np.diff(self.values[order]) <= tol))

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(
            {"gamma_db": self.gamma_grid, "coverage": self.values}
        )
        if self.ci_halfwidth is not None:
            frame["ci_halfwidth"] = self.ci_halfwidth
        frame["engine"] = self.provenance
        return frame


def parse_gamma_grid(spec: str) -> np.ndarray:
    """Parse ``a:b:step`` (dB, inclusive of b) or a comma-separated list."""
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"Gamma grid must look like a:b:step, got {spec!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"Invalid gamma grid {spec!r}")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return np.round(start + step * np.arange(count), 10)
    return np.array([float(p) for p in spec.split(",") if p.strip()])


def db_to_linear(values: Sequence[float]) -> np.ndarray:
    return 10.0 ** (np.asarray(values, dtype=float) / 10.0)


class GridMismatchError(ValueError):
    """Two curves were computed on different threshold grids."""


def compare_curves(
    analytic: CoverageCurve, simulated: CoverageCurve, tol: float
) -> Dict[str, Any]:
    """
    Pointwise analytic-vs-simulated report; a point passes when |diff| <= tol.
    A zero tolerance fails every point, identical values included.
    """
    if analytic.gamma_grid.shape != simulated.gamma_grid.shape or not np.allclose(
        analytic.gamma_grid, simulated.gamma_grid, rtol=0.0, atol=1e-9
    ):
        raise GridMismatchError(
            f"Threshold grids differ: {analytic.gamma_grid.size} analytic points vs "
            f"{simulated.gamma_grid.size} simulated points"
        )
    halfwidths = (
        simulated.ci_halfwidth
        if simulated.ci_halfwidth is not None
        else np.zeros_like(simulated.values)
    )
    diffs = np.abs(analytic.values - simulated.values)
    points = [
        {
            "gamma_db": float(g),
            "analytic": float(a),
            "simulated": float(m),
            "ci_halfwidth": float(h),
            "abs_diff": float(d),
            "passed": bool(tol > 0 and d <= tol),
        }
        for g, a, m, h, d in zip(
            analytic.gamma_grid, analytic.values, simulated.values, halfwidths, diffs
        )
    ]
    return {
        "tolerance": tol,
        "max_abs_diff": float(diffs.max()) if diffs.size else 0.0,
        "passed": all(p["passed"] for p in points),
        "points": points,
    }
