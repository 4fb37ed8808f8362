"""
Cone-model gains for interfering links.

An interferer's beam hits the typical UE with main-lobe gain when the UE falls
inside its horizontal and vertical half-power beamwidths, and with side-lobe
gain otherwise; likewise for the UE's receive beam.
"""

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from ..core.params import DerivedConstants, Scenario, half_power_beamwidth

ArrayLike = Union[float, np.ndarray]


class ConeModelError(ValueError):
    """Side-lobe gain formula breaks down for this array size."""


@dataclass(frozen=True)
class ConeGains:
    A_main: float
    A_side: float
    U_main: float
    U_side: float

    def combinations(self) -> np.ndarray:
        """Gains ordered (mm, ms, sm, ss) as AP lobe x UE lobe."""
        return np.array(
            [
                self.A_main * self.U_main,
                self.A_main * self.U_side,
                self.A_side * self.U_main,
                self.A_side * self.U_side,
            ]
        )


@dataclass(frozen=True)
class BeamGeometry:
    phi_A_V: float  # rad
    phi_A_H: float
    phi_U_V: float
    phi_U_H: float
    phi_AP: float  # elevation of an AP at the edge of its coverage radius


@dataclass(frozen=True)
class GainPmf:
    gains: np.ndarray  # (4,)
    probabilities: np.ndarray  # (4,)

    def mean(self) -> float:
        return float(np.dot(self.gains, self.probabilities))


def side_lobe_gain(N: int) -> float:
    if N < 2:
        raise ConeModelError(f"cone model invalid for N={N}: need N >= 2")
    phi = half_power_beamwidth(N)
    spread = math.asin(math.tan(phi / 2) * math.tan(phi / 2))
    numerator = math.pi - N**2 * math.pi * spread
    if numerator <= 0:
        raise ConeModelError(f"cone model invalid for N={N}: nonpositive numerator")
    return numerator / (math.pi - spread)


def beam_geometry(c: DerivedConstants) -> BeamGeometry:
    return BeamGeometry(
        phi_A_V=c.phi_A_V, phi_A_H=c.phi_A_H, phi_U_V=c.phi_U_V, phi_U_H=c.phi_U_H, phi_AP=c.phi_AP
    )


def cone_gains(c: DerivedConstants, s: Scenario) -> ConeGains:
    return ConeGains(
        A_main=c.G_A_max,
        A_side=side_lobe_gain(s.N_A),
        U_main=c.G_U_max,
        U_side=side_lobe_gain(s.N_U),
    )


def ap_hit_probabilities(c: DerivedConstants) -> Tuple[float, float]:
    """(horizontal, vertical) probability an interfering AP beam covers the UE."""
    beams = beam_geometry(c)
    p_h = beams.phi_A_H / (2 * math.pi)
    p_v = min(beams.phi_A_V / (math.pi / 2 - beams.phi_AP), 1.0)
    return p_h, p_v


def ue_horizontal_hit_probability(c: DerivedConstants) -> float:
    return c.phi_U_H / (2 * math.pi)


def r_u0_max(d0: ArrayLike, c: DerivedConstants) -> ArrayLike:
    """Farthest interferer distance inside the UE's vertical main lobe."""
    d0 = np.asarray(d0, dtype=float)
    lowest = np.arctan2(c.height_gap, d0) - c.phi_U_V / 2
    tilt = np.tan(np.maximum(lowest, 1e-300))
    reach = np.where(lowest > 0, c.height_gap / tilt, np.inf)
    return float(reach) if reach.ndim == 0 else reach


def interferer_hit_probabilities(
    d_i: ArrayLike, d0: float, c: DerivedConstants
) -> Tuple[float, np.ndarray]:
    """p_A (scalar) and p_U (per interferer) of main-lobe alignment."""
    p_ah, p_av = ap_hit_probabilities(c)
    in_vertical = np.asarray(d_i, dtype=float) <= r_u0_max(d0, c)
    return p_ah * p_av, ue_horizontal_hit_probability(c) * in_vertical


def gain_probability_table(
    d_i: ArrayLike, d0: float, c: DerivedConstants
) -> np.ndarray:
    """Probabilities of the four gain combinations, shape (len(d_i), 4)."""
    p_a, p_u = interferer_hit_probabilities(d_i, d0, c)
    p_u = np.atleast_1d(p_u).astype(float)
    return np.column_stack(
        (p_a * p_u, p_a * (1 - p_u), (1 - p_a) * p_u, (1 - p_a) * (1 - p_u))
    )


def interferer_gain_pmf(
    d_i: float, d0: float, c: DerivedConstants, s: Scenario
) -> GainPmf:
    if not d_i >= d0 > 0:
        raise ValueError(f"Need d_i >= d0 > 0, got d_i={d_i}, d0={d0}")
    return GainPmf(
        gains=cone_gains(c, s).combinations(),
        probabilities=gain_probability_table(d_i, d0, c)[0],
    )
