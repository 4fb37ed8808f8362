"""Discretization of the coverage double integral and the interference integral."""

import math
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import optimize

from ..core.params import DerivedConstants, Scenario
from ..geometry.blockage import los_mass_limit, nearest_los_quantile
from ..utils.config import QuadratureConfig, get_config


@dataclass(frozen=True)
class QuadratureSpec:
    d0_nodes: int = 24
    hpe_nodes: int = 12
    panel_nodes: int = 16
    cutoff_rel: float = 1e-8
    series_tol: float = 1e-8
    l_cap: int = 400
    clamp_tol: float = 1e-6
    printed_rho: bool = False

    @classmethod
    def from_config(cls, cfg: Optional[QuadratureConfig] = None) -> "QuadratureSpec":
        cfg = cfg or get_config().quadrature
        return cls(
            d0_nodes=cfg.d0_nodes,
            hpe_nodes=cfg.hpe_nodes,
            panel_nodes=cfg.panel_nodes,
            cutoff_rel=cfg.cutoff_rel,
            series_tol=cfg.series_tol,
            l_cap=cfg.l_cap,
            clamp_tol=cfg.clamp_tol,
            printed_rho=cfg.printed_rho,
        )

    def refined(self, factor: int = 2) -> "QuadratureSpec":
        return replace(
            self,
            d0_nodes=self.d0_nodes * factor,
            hpe_nodes=self.hpe_nodes * factor,
            panel_nodes=self.panel_nodes * factor,
        )


def gauss_legendre(a: float, b: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(n)
    half = (b - a) / 2.0
    return a + half * (x + 1.0), half * w


def interference_cutoff(c: DerivedConstants, rel: float = 1e-8) -> float:
    """Distance beyond the peak where d exp(-(alpha+eta) d) falls to ``rel`` of its peak."""
    rate = c.blockage_rate
    if rate <= 0:
        raise ValueError("Interference cutoff needs a positive blockage rate")
    peak_at = 1.0 / rate
    log_target = math.log(rel) + math.log(peak_at) - 1.0

    def excess(d):
        return math.log(d) - rate * d - log_target

    upper = 2 * peak_at
    while excess(upper) > 0:
        upper *= 2.0
    return optimize.brentq(excess, peak_at, upper, xtol=1e-10)


def panel_breaks(start: float, stop: float, kink: float) -> List[float]:
    """Panel edges from ``start`` to ``stop``: a break at ``kink`` then doubling widths."""
    breaks = [start]
    if start < kink < stop:
        breaks.append(kink)
    edge = breaks[-1]
    while edge < stop:
        edge = min(stop, max(2.0 * edge, edge + 1.0))
        breaks.append(edge)
    return breaks


def composite_nodes(breaks: List[float], n: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = zip(*(gauss_legendre(a, b, n) for a, b in zip(breaks, breaks[1:])))
    return np.concatenate(nodes), np.concatenate(weights)


@dataclass(frozen=True)
class OuterNodes:
    d0: np.ndarray
    d0_weights: np.ndarray  # sum to the probability that a LoS AP exists
    h_pe: np.ndarray
    h_weights: np.ndarray  # sum to 1
    d_max: float


def outer_nodes(c: DerivedConstants, s: Scenario, spec: QuadratureSpec) -> OuterNodes:
    """
    Nodes for the (d0, h_pe) average. d0 is integrated in u = F_D0(d0) and
    h_pe in t = h_pe^beta, which turns both densities into uniform weights.
    """
    u_max = -math.expm1(-los_mass_limit(c, s))
    u, u_weights = gauss_legendre(0.0, u_max, spec.d0_nodes)
    d0 = np.array([nearest_los_quantile(level, c, s) for level in u])

    if math.isinf(c.beta):
        h, h_weights = np.ones(1), np.ones(1)
    else:
        t, h_weights = gauss_legendre(0.0, 1.0, spec.hpe_nodes)
        h = t ** (1.0 / c.beta)
    return OuterNodes(
        d0=d0, d0_weights=u_weights, h_pe=h, h_weights=h_weights, d_max=float(d0.max())
    )
