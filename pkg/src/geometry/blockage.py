"""
Blockage laws and the nearest line-of-sight AP distance.

Humans (cylinders) and walls (a Boolean process of axis-aligned segments)
thin the AP process independently, so a link of horizontal length d is LoS
with probability exp(-(alpha + eta) d).
"""

import math
from typing import Union

import numpy as np
from scipy import integrate, optimize

from ..core.params import DerivedConstants, Scenario

ArrayLike = Union[float, np.ndarray]


def _out(value: np.ndarray) -> ArrayLike:
    return float(value) if np.ndim(value) == 0 else value


def human_los_probability(d: ArrayLike, c: DerivedConstants) -> ArrayLike:
    return _out(np.exp(-c.alpha * np.asarray(d, dtype=float)))


def wall_los_probability(d: ArrayLike, c: DerivedConstants) -> ArrayLike:
    return _out(np.exp(-c.eta * np.asarray(d, dtype=float)))


def los_probability(d: ArrayLike, c: DerivedConstants) -> ArrayLike:
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ValueError("Distance must be >= 0")
    return _out(np.exp(-c.blockage_rate * d))


def los_intensity(d: ArrayLike, c: DerivedConstants, s: Scenario) -> ArrayLike:
    """Radial intensity of LoS APs, 2 pi lambda_A d p_LoS(d)."""
    d = np.asarray(d, dtype=float)
    return _out(2 * np.pi * s.lambda_A * d * np.exp(-c.blockage_rate * d))


def los_mass_limit(c: DerivedConstants, s: Scenario) -> float:
    """Expected number of LoS APs in the whole plane."""
    rate = c.blockage_rate
    if rate <= 0:
        return math.inf
    return 2 * math.pi * s.lambda_A / rate**2


def los_mass(d0: ArrayLike, c: DerivedConstants, s: Scenario) -> ArrayLike:
    """Expected number of LoS APs within horizontal distance d0."""
    x = c.blockage_rate * np.asarray(d0, dtype=float)
    # 1 - e^-x (1 + x), written to stay accurate for small x
    shape = -np.expm1(-x) - x * np.exp(-x)
    return _out(los_mass_limit(c, s) * shape)


def nearest_los_pdf(d0: ArrayLike, c: DerivedConstants, s: Scenario) -> ArrayLike:
    d0 = np.asarray(d0, dtype=float)
    return _out(los_intensity(d0, c, s) * np.exp(-los_mass(d0, c, s)))


def nearest_los_cdf(d0: ArrayLike, c: DerivedConstants, s: Scenario) -> ArrayLike:
    return _out(-np.expm1(-np.asarray(los_mass(d0, c, s))))


def nearest_los_quantile(u: float, c: DerivedConstants, s: Scenario) -> float:
    """Distance d with nearest_los_cdf(d) = u; u must be below the total mass."""
    total = -math.expm1(-los_mass_limit(c, s))
    if not 0 <= u < total:
        raise ValueError(f"Quantile level {u} outside [0, {total})")
    if u == 0:
        return 0.0
    target = -math.log1p(-u)
    upper = 1.0 / c.blockage_rate
    while los_mass(upper, c, s) < target:
        upper *= 2.0
    return optimize.brentq(
        lambda d: los_mass(d, c, s) - target, 0.0, upper, xtol=1e-12, rtol=1e-14
    )


def mean_nearest_los_distance(c: DerivedConstants, s: Scenario) -> float:
    """Mean distance to the nearest LoS AP, given that one exists."""
    floor = math.exp(-los_mass_limit(c, s))
    total = 1.0 - floor

    def survival(d):
        return math.exp(-los_mass(d, c, s)) - floor

    value, _ = integrate.quad(survival, 0.0, math.inf, limit=200)
    return value / total
