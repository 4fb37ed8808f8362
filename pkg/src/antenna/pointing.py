"""
Beam misalignment caused by location-estimation error.

Both ends steer along the same erroneous estimate, so the horizontal and
vertical angle errors are shared by AP and UE. Under the Gaussian-beam
approximation the combined loss H_pe follows a power law with CDF h^beta.
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..core.params import GAUSSIAN_BEAM_FACTOR, Scenario, pointing_beta

ArrayLike = Union[float, np.ndarray]

POINTING_MODES = ("exact", "gaussian")


class DegeneratePointingError(ValueError):
    """Density requested for a model without pointing error (H_pe == 1)."""


@dataclass(frozen=True)
class PointingModel:
    sigma_theta: float  # rad
    N_A: int
    N_U: int
    mode: str = "gaussian"

    def __post_init__(self):
        if self.mode not in POINTING_MODES:
            raise ValueError(f"Unknown pointing mode: {self.mode}")
        if self.sigma_theta < 0:
            raise ValueError("sigma_theta must be >= 0")

    @classmethod
    def from_scenario(cls, s: Scenario, mode: str = "gaussian") -> "PointingModel":
        return cls(sigma_theta=s.sigma_theta, N_A=s.N_A, N_U=s.N_U, mode=mode)

    @property
    def beta(self) -> float:
        return pointing_beta(self.sigma_theta, self.N_A, self.N_U)

    @property
    def omega_A(self) -> float:
        return GAUSSIAN_BEAM_FACTOR / self.N_A

    @property
    def omega_U(self) -> float:
        return GAUSSIAN_BEAM_FACTOR / self.N_U

    @property
    def is_degenerate(self) -> bool:
        return self.sigma_theta == 0

    @property
    def max_gain(self) -> float:
        return math.pi**2 * self.N_A**2 * self.N_U**2


def _out(value: np.ndarray) -> ArrayLike:
    return float(value) if np.ndim(value) == 0 else value


def _axis_factor(x: np.ndarray, n: int) -> np.ndarray:
    half_phase = np.pi * x / 2.0
    num = np.sin(n * half_phase)
    den = n * np.sin(half_phase)
    safe = np.where(np.abs(den) < 1e-12, 1.0, den)
    return np.where(np.abs(den) < 1e-12, 1.0, num / safe)


def array_factor(theta_V: ArrayLike, theta_H: ArrayLike, N: int) -> ArrayLike:
    """Normalized power pattern of an N x N half-wavelength planar array."""
    u = np.sin(np.asarray(theta_H, dtype=float))
    v = np.sin(np.asarray(theta_V, dtype=float))
    return _out((_axis_factor(u, N) * _axis_factor(v, N)) ** 2)


def gaussian_beam(theta_V: ArrayLike, theta_H: ArrayLike, N: int) -> ArrayLike:
    theta2 = np.asarray(theta_V, dtype=float) ** 2 + np.asarray(theta_H, dtype=float) ** 2
    return _out(np.exp(-theta2 * N**2 / GAUSSIAN_BEAM_FACTOR**2))


def pointing_loss_pdf(h_pe: ArrayLike, model: PointingModel) -> ArrayLike:
    if model.is_degenerate:
        raise DegeneratePointingError("degenerate: H_pe ≡ 1")
    h = np.asarray(h_pe, dtype=float)
    if np.any((h <= 0) | (h > 1)):
        raise ValueError("Pointing loss must lie in (0, 1]")
    beta = model.beta
    return _out(beta * h ** (beta - 1.0))


def pointing_loss_cdf(h_pe: ArrayLike, model: PointingModel) -> ArrayLike:
    h = np.clip(np.asarray(h_pe, dtype=float), 0.0, 1.0)
    if model.is_degenerate:
        return _out((h >= 1.0).astype(float))
    return _out(h**model.beta)


def sample_pointing_loss(
    model: PointingModel, rng: np.random.Generator, size=None
) -> ArrayLike:
    if model.is_degenerate:
        return 1.0 if size is None else np.ones(size)

    theta_H = rng.normal(0.0, model.sigma_theta, size)
    theta_V = rng.normal(0.0, model.sigma_theta, size)
    if model.mode == "gaussian":
        theta2 = theta_H**2 + theta_V**2
        h = np.exp(-theta2 * (model.N_A**2 + model.N_U**2) / GAUSSIAN_BEAM_FACTOR**2)
    else:
        h = np.asarray(array_factor(theta_V, theta_H, model.N_A)) * np.asarray(
            array_factor(theta_V, theta_H, model.N_U)
        )
    return _out(np.asarray(h))


def mean_effective_gain(model: PointingModel) -> float:
    """Mean combined array gain G_max E[H_pe] under the power-law loss."""
    if model.is_degenerate:
        return model.max_gain
    beta = model.beta
    return model.max_gain * beta / (beta + 1.0)


def mean_gain_limit(sigma_theta: float, n_u: int) -> float:
    """Mean gain as the AP array grows without bound."""
    return GAUSSIAN_BEAM_FACTOR**2 * math.pi**2 * n_u**2 / (2 * sigma_theta**2)
