"""
Laplace transform of interference plus noise seen by the typical UE, given
the serving LoS AP at horizontal distance d0.

    L(s | d0) = exp(g(s)),
    g(s) = -s N0 - int_{d0}^{D_int} Lambda_LoS(d) sum_G Pr(G | d, d0) (1 - E[exp(-s a_G(d) H)]) dd

with a_G(d) = P_t xi G W(d). High-order derivatives are handled as scaled
Taylor coefficients a_l = (-s)^l L^(l)(s) / l!, which are nonnegative and
sum to one, so the coverage sums never cancel.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from ..antenna.cone import cone_gains, gain_probability_table, r_u0_max
from ..channel.large_scale import path_weight
from ..channel.mftr import (
    MAX_RAW_DERIVATIVE_ORDER,
    MftrModel,
    mftr_laplace_complement,
    mftr_laplace_factor_derivatives,
    mftr_poisson_coefficients,
)
from ..core.params import DerivedConstants, Scenario
from ..geometry.blockage import los_intensity
from .quadrature import (
    QuadratureSpec,
    composite_nodes,
    interference_cutoff,
    panel_breaks,
)


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested accuracy."""

    def __init__(self, message: str, estimate: float, bound: float):
        super().__init__(f"{message} (estimate={estimate:.6e}, error bound={bound:.3e})")
        self.estimate = estimate
        self.bound = bound


@dataclass(frozen=True, eq=False)
class InterferenceGrid:
    """Quadrature nodes of the interference integral, one entry per (d, gain) pair."""

    d0: float
    powers: np.ndarray  # P_t xi G W(d)
    weights: np.ndarray  # quadrature weight x Lambda_LoS(d) x Pr(G)
    cutoff: float
    r_max: float

    @property
    def size(self) -> int:
        return self.powers.size


def interference_grid(
    d0: float, c: DerivedConstants, s: Scenario, spec: QuadratureSpec
) -> InterferenceGrid:
    cutoff = interference_cutoff(c, spec.cutoff_rel)
    r_max = float(r_u0_max(d0, c))
    if d0 >= cutoff:
        empty = np.empty(0)
        return InterferenceGrid(d0, empty, empty, cutoff, r_max)

    d, quad_weights = composite_nodes(panel_breaks(d0, cutoff, r_max), spec.panel_nodes)
    gains = cone_gains(c, s).combinations()
    powers = c.P_t_lin * c.xi * np.outer(path_weight(d, c, s), gains)
    weights = (quad_weights * los_intensity(d, c, s))[:, None] * gain_probability_table(
        d, d0, c
    )
    keep = weights > 0
    return InterferenceGrid(d0, powers[keep], weights[keep], cutoff, r_max)


def laplace_interference(
    s_val: float,
    d0: float,
    c: DerivedConstants,
    s: Scenario,
    model: MftrModel,
    spec: Optional[QuadratureSpec] = None,
    epsrel: float = 1e-10,
) -> float:
    """L(s | d0) by adaptive quadrature."""
    if s_val < 0 or d0 < 0:
        raise ValueError("s and d0 must be >= 0")
    spec = spec or QuadratureSpec()
    if s_val == 0:
        return 1.0

    cutoff = interference_cutoff(c, spec.cutoff_rel)
    r_max = float(r_u0_max(d0, c))
    gains = cone_gains(c, s).combinations()

    def integrand(d: float) -> float:
        probs = gain_probability_table(d, d0, c)[0]
        powers = c.P_t_lin * c.xi * path_weight(d, c, s) * gains
        miss = np.asarray(mftr_laplace_complement(s_val, powers, model))
        return float(los_intensity(d, c, s) * np.dot(probs, miss))

    if d0 >= cutoff:
        value, bound = 0.0, 0.0
    else:
        points = [r_max] if d0 < r_max < cutoff else None
        value, bound = integrate.quad(
            integrand, d0, cutoff, points=points, limit=200, epsabs=1e-14, epsrel=epsrel
        )
    if bound > max(1e-10, 1e-8 * abs(value)):
        raise QuadratureError("Interference integral did not converge", value, bound)
    return math.exp(-s_val * c.N0_lin - value)


def scaled_laplace_coefficients(
    s_val: float,
    grid: InterferenceGrid,
    c: DerivedConstants,
    model: MftrModel,
    l_max: int,
) -> np.ndarray:
    """a_l = (-s)^l L^(l)(s) / l! for l = 0..l_max."""
    y = model.sigma2_half * s_val * grid.powers
    noise = s_val * c.N0_lin

    # c_k = (-s)^k g^(k)(s) / k!
    cumulants = mftr_poisson_coefficients(y, model, l_max) @ grid.weights
    cumulants[0] = -noise - float(
        np.dot(grid.weights, mftr_laplace_complement(s_val, grid.powers, model))
    )
    if l_max >= 1:
        cumulants[1] += noise

    k = np.arange(l_max + 1, dtype=float)
    weighted = k * cumulants
    coeffs = np.empty(l_max + 1)
    coeffs[0] = math.exp(cumulants[0])
    for l in range(1, l_max + 1):
        # l a_l = sum_{k=1}^{l} k c_k a_{l-k}
        coeffs[l] = np.dot(weighted[1 : l + 1], coeffs[l - 1 :: -1][:l]) / l
    return coeffs


def laplace_derivatives(
    s_val: float,
    d0: float,
    l_max: int,
    c: DerivedConstants,
    s: Scenario,
    model: MftrModel,
    spec: Optional[QuadratureSpec] = None,
    grid: Optional[InterferenceGrid] = None,
) -> np.ndarray:
    """L^(l)(s | d0) for l = 0..l_max."""
    spec = spec or QuadratureSpec()
    grid = grid or interference_grid(d0, c, s, spec)

    if l_max > MAX_RAW_DERIVATIVE_ORDER:
        if s_val <= 0:
            raise ValueError("Orders above the raw recurrence limit need s > 0")
        scaled = scaled_laplace_coefficients(s_val, grid, c, model, l_max)
        l = np.arange(l_max + 1)
        magnitude = np.exp(gammaln(l + 1) - l * math.log(s_val))
        return scaled * magnitude * np.where(l % 2 == 0, 1.0, -1.0)

    # g^(k)(s): noise term plus the d-integral of the fading-factor derivatives
    factor = mftr_laplace_factor_derivatives(s_val, grid.powers, model, l_max)
    g = factor @ grid.weights
    g[0] = -s_val * c.N0_lin - float(
        np.dot(grid.weights, mftr_laplace_complement(s_val, grid.powers, model))
    )
    if l_max >= 1:
        g[1] -= c.N0_lin

    derivatives = np.empty(l_max + 1)
    derivatives[0] = math.exp(g[0])
    for l in range(1, l_max + 1):
        derivatives[l] = sum(
            math.comb(l - 1, k - 1) * g[k] * derivatives[l - k] for k in range(1, l + 1)
        )
    return derivatives


def mean_interference(
    d0: float,
    c: DerivedConstants,
    s: Scenario,
    spec: Optional[QuadratureSpec] = None,
) -> float:
    """E[I | d0] for unit-mean fading."""
    grid = interference_grid(d0, c, s, spec or QuadratureSpec())
    return float(np.dot(grid.weights, grid.powers))
