"""
Conditional Monte Carlo: interference fields behind a serving AP at a fixed
distance, and nearest-LoS-AP distances. These are the oracles for the
Laplace transform, conditional coverage and the distance law.
"""

from typing import Optional, Tuple

import numpy as np

from ..analytic.quadrature import interference_cutoff
from ..antenna.cone import r_u0_max
from ..channel.large_scale import path_weight
from ..channel.mftr import mftr_sample
from ..core.params import DerivedConstants, Scenario
from ..geometry.blockage import los_mass
from ..geometry.scene import sample_ap_field, sample_los_mask
from .trial import TrialSetup

TABLE_POINTS = 16384


def sample_los_interferer_distances(
    d0: float,
    n: int,
    rng: np.random.Generator,
    c: DerivedConstants,
    s: Scenario,
    radius: Optional[float] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Distances of LoS APs beyond d0 for ``n`` independent fields, drawn from
    the thinned process by inverting its mass function. Returns
    (distances, owner) where owner[i] is the field index of distances[i].
    """
    radius = radius if radius is not None else interference_cutoff(c)
    d_grid = np.linspace(d0, radius, TABLE_POINTS)
    mass_grid = np.asarray(los_mass(d_grid, c, s))
    base, mass = mass_grid[0], mass_grid[-1] - mass_grid[0]

    counts = rng.poisson(mass, n)
    total = int(counts.sum())
    targets = base + rng.random(total) * mass
    distances = np.interp(targets, mass_grid, d_grid)
    owner = np.repeat(np.arange(n), counts)
    return distances, owner


def sample_conditional_interference(
    d0: float,
    n: int,
    rng: np.random.Generator,
    c: DerivedConstants,
    s: Scenario,
    setup: TrialSetup,
    radius: Optional[float] = None,
) -> np.ndarray:
    """Aggregate interference power (mW) for ``n`` fields given the serving distance."""
    distances, owner = sample_los_interferer_distances(d0, n, rng, c, s, radius)
    k = distances.size
    g = setup.gains
    ap_main = rng.random(k) < setup.p_ap_hit
    ue_main = (rng.random(k) < setup.p_ue_horizontal_hit) & (distances <= r_u0_max(d0, c))
    gains = np.where(ap_main, g.A_main, g.A_side) * np.where(ue_main, g.U_main, g.U_side)
    fading = np.asarray(mftr_sample(setup.model, rng, size=k))
    power = c.P_t_lin * c.xi * gains * path_weight(distances, c, s) * fading
    return np.bincount(owner, weights=power, minlength=n)


def empirical_laplace(
    s_val: float,
    d0: float,
    n: int,
    rng: np.random.Generator,
    c: DerivedConstants,
    s: Scenario,
    setup: TrialSetup,
) -> float:
    """Sample mean of exp(-s (I + N0)) over simulated interference fields."""
    interference = sample_conditional_interference(d0, n, rng, c, s, setup)
    return float(np.mean(np.exp(-s_val * (interference + c.N0_lin))))


def simulate_conditional_coverage(
    h_pe: float,
    d0: float,
    gamma_th: float,
    n: int,
    rng: np.random.Generator,
    c: DerivedConstants,
    s: Scenario,
    setup: TrialSetup,
) -> float:
    """Fraction of fields with SINR > gamma_th (linear) at fixed h_pe and d0."""
    interference = sample_conditional_interference(d0, n, rng, c, s, setup)
    fading = np.asarray(mftr_sample(setup.model, rng, size=n))
    signal = c.P_t_lin * c.xi * c.G_max * h_pe * path_weight(d0, c, s) * fading
    return float(np.mean(signal / (interference + c.N0_lin) > gamma_th))


def sample_nearest_los_distances(
    n: int,
    rng: np.random.Generator,
    s: Scenario,
    c: DerivedConstants,
    blockage_mode: str = "thinned",
    radius: Optional[float] = None,
) -> np.ndarray:
    """Nearest LoS AP distance per realization (NaN when no AP is LoS)."""
    radius = radius if radius is not None else c.sim_radius
    out = np.full(n, np.nan)
    for i in range(n):
        field = sample_ap_field(s, rng, radius)
        los = sample_los_mask(field, s, c, rng, blockage_mode)
        if los.any():
            out[i] = field.distances[los].min()
    return out
