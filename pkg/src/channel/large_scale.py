"""Large-scale THz path gain: free-space spreading plus molecular absorption."""

from dataclasses import dataclass
from typing import Union

import numpy as np

from ..core.params import DerivedConstants, Scenario

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class LinkGain:
    d: float
    W: float
    xi: float

    @property
    def H_L(self) -> float:
        return self.xi * self.W


def path_weight(d: ArrayLike, c: DerivedConstants, s: Scenario) -> ArrayLike:
    """W(d) = exp(-eps * r) / r^2 with r the 3D AP-UE distance."""
    d = np.asarray(d, dtype=float)
    r2 = d**2 + c.height_gap**2
    w = np.exp(-s.eps_f * np.sqrt(r2)) / r2
    return float(w) if w.ndim == 0 else w


def large_scale_gain(d: float, c: DerivedConstants, s: Scenario) -> LinkGain:
    if d < 0:
        raise ValueError(f"Horizontal distance must be >= 0, got {d}")
    return LinkGain(d=float(d), W=path_weight(d, c, s), xi=c.xi)
