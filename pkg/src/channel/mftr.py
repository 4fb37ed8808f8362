"""
Multi-cluster fluctuating two-ray (MFTR) fading.

The CDF is a Poisson-Gamma mixture: given the number J of "specular" quanta,
H ~ Gamma(J + mu, 2 sigma^2), and the mixing weights

    w_j = (m^m / Gamma(m)) (mu K)^j r_j / j!

sum to one. All series work is carried out on the weights in log space.
"""

from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache
from typing import Optional, Tuple, Union

import numpy as np
from numpy.polynomial.chebyshev import chebgauss
from scipy.special import gammainc, gammaincc, gammaln, hyp2f1, logsumexp, xlogy

from ..core.params import MftrParams
from ..utils.config import ChannelConfig, get_config
from ..utils.logger import get_logger

ArrayLike = Union[float, np.ndarray]

logger = get_logger("mftr")

STREAK_LENGTH = 3
HYPERGEOMETRIC_BLOCK = 50
MAX_RAW_DERIVATIVE_ORDER = 12


class CoefficientError(ValueError):
    """The r_j series is inconsistent or failed to converge."""


@dataclass(frozen=True)
class SeriesSettings:
    """How the weight series is built and where it may be cut."""

    J_cap: int = 1000
    tol: float = 1e-10
    method: str = "phase-average"
    phase_nodes: int = 1024
    normalization_tol: float = 1e-8

    @classmethod
    def from_config(cls, cfg: Optional[ChannelConfig] = None) -> "SeriesSettings":
        cfg = cfg or get_config().channel
        return cls(
            J_cap=cfg.j_cap,
            tol=cfg.series_tol,
            method=cfg.coefficient_method,
            phase_nodes=cfg.phase_nodes,
            normalization_tol=cfg.normalization_tol,
        )


@dataclass(frozen=True, eq=False)
class MftrModel:
    """
    Fading law for one parameter set. The weight series is computed on first
    access, so sampling alone never pays for it.
    """

    K: float
    m: float
    delta: float
    mu: int
    sigma2_half: float  # 2 sigma^2
    settings: SeriesSettings = field(default_factory=SeriesSettings, repr=False)

    @property
    def params(self) -> MftrParams:
        return MftrParams(K=self.K, m=self.m, delta=self.delta, mu=self.mu)

    @cached_property
    def _series(self) -> Tuple[np.ndarray, np.ndarray]:
        log_r, weights = _coefficient_series(self.params, self.settings)
        log_r.setflags(write=False)
        weights.setflags(write=False)
        return log_r, weights

    @property
    def log_r(self) -> np.ndarray:
        return self._series[0]

    @property
    def weights(self) -> np.ndarray:
        return self._series[1]

    @property
    def J_max(self) -> int:
        return self.weights.size - 1

    @property
    def tol(self) -> float:
        return self.settings.tol

    @property
    def series_ready(self) -> bool:
        return "_series" in self.__dict__

    @property
    def r(self) -> np.ndarray:
        return np.exp(self.log_r)

    @property
    def orders(self) -> np.ndarray:
        """Gamma shape j + mu for each retained weight."""
        return np.arange(self.weights.size) + self.mu

    def tail_mass(self) -> np.ndarray:
        """tail[j] = sum of weights with index >= j."""
        return np.cumsum(self.weights[::-1])[::-1]


def _log_weight_prefactor(params: MftrParams, j: np.ndarray) -> np.ndarray:
    m = params.m
    return (
        m * np.log(m)
        - gammaln(m)
        + xlogy(j, params.mu * params.K)
        - gammaln(j + 1)
    )


def _log_r_phase_average(params: MftrParams, j: np.ndarray, nodes: int) -> np.ndarray:
    # E over a uniform phase difference of (1+D cos)^j / (m + mu K (1+D cos))^(m+j),
    # written as a Gauss-Chebyshev rule in u = cos(theta).
    u, _ = chebgauss(nodes)
    base = 1.0 + params.delta * u
    denom = params.m + params.mu * params.K * base
    exponent = np.outer(j, np.log(base)) - np.outer(params.m + j, np.log(denom))
    return gammaln(params.m + j) + logsumexp(exponent, axis=1) - np.log(nodes)


def _r_hypergeometric(params: MftrParams, j: int) -> float:
    m, mu_k, delta = params.m, params.mu * params.K, params.delta
    n = m + j
    b = mu_k * delta / (m + mu_k)

    nu = np.arange(j + 1)
    log_poch = gammaln(n + nu) - gammaln(n) - gammaln(nu + 1)
    harmonics = (
        np.power(-b / 2.0, nu)
        * np.exp(log_poch)
        * hyp2f1((n + nu) / 2.0, (n + nu + 1) / 2.0, nu + 1.0, b * b)
    )

    total = 0.0
    for k in range(j + 1):
        l = np.arange(k + 1)
        binom_kl = np.exp(gammaln(k + 1) - gammaln(l + 1) - gammaln(k - l + 1))
        inner = float(np.sum(binom_kl * harmonics[np.abs(2 * l - k)]))
        binom_jk = np.exp(gammaln(j + 1) - gammaln(k + 1) - gammaln(j - k + 1))
        total += binom_jk * (delta / 2.0) ** k * inner

    return float(np.exp(gammaln(n) - n * np.log(m + mu_k)) * total)


def mftr_coefficients(
    params: MftrParams,
    J_max: int = 1000,
    tol: float = 1e-10,
    method: str = "phase-average",
    phase_nodes: int = 1024,
    normalization_tol: float = 1e-8,
) -> np.ndarray:
    """Return r_0..r_J, truncated where the weight series has converged."""
    settings = SeriesSettings(J_max, tol, method, phase_nodes, normalization_tol)
    log_r, _ = _coefficient_series(params, settings)
    return np.exp(log_r)


def _hypergeometric_weights(
    params: MftrParams, J_max: int, tol: float
) -> Tuple[np.ndarray, np.ndarray]:
    # The closed form costs O(j^2) per term, so stop at the first converged block.
    r = np.empty(0)
    weights = r
    while r.size <= J_max:
        block = np.arange(r.size, min(r.size + HYPERGEOMETRIC_BLOCK, J_max + 1))
        r = np.append(r, [_r_hypergeometric(params, int(k)) for k in block])
        j = np.arange(r.size, dtype=float)
        weights = np.exp(_log_weight_prefactor(params, j)) * r
        if _truncation_index(weights, tol) is not None:
            break
    with np.errstate(divide="ignore", invalid="ignore"):
        log_r = np.log(r)
    return log_r, weights


def _coefficient_series(
    params: MftrParams, settings: SeriesSettings
) -> Tuple[np.ndarray, np.ndarray]:
    J_max, tol = settings.J_cap, settings.tol
    if J_max < 1:
        raise ValueError(f"J_max must be >= 1, got {J_max}")

    if settings.method == "phase-average":
        j = np.arange(J_max + 1, dtype=float)
        log_r = _log_r_phase_average(params, j, settings.phase_nodes)
        weights = np.exp(_log_weight_prefactor(params, j) + log_r)
    elif settings.method == "hypergeometric":
        log_r, weights = _hypergeometric_weights(params, J_max, tol)
    else:
        raise ValueError(f"Unknown coefficient method: {settings.method}")

    truncation = _truncation_index(weights, tol)
    if truncation is None:
        # Cap reached before the term test passed: usable only if the missing
        # tail mass is already below the normalization tolerance.
        missing = 1.0 - float(np.sum(weights))
        if not abs(missing) <= settings.normalization_tol:
            tail_ratio = weights[-1] / max(np.sum(weights), np.finfo(float).tiny)
            raise CoefficientError(
                f"MFTR series did not converge within J_max={J_max} "
                f"(K={params.K}, tail term ratio {tail_ratio:.3e} > tol {tol:.1e}, "
                f"missing mass {missing:.3e})"
            )
        logger.warning(
            f"MFTR series for K={params.K} cut at J_max={J_max} "
            f"with missing mass {missing:.1e}"
        )
        truncation = weights.size - 1

    weights = weights[: truncation + 1]
    log_r = log_r[: truncation + 1]
    total = float(np.sum(weights))
    if not np.all(np.isfinite(weights)) or abs(total - 1.0) > settings.normalization_tol:
        raise CoefficientError(
            f"r_j formula inconsistent: normalization sum {total:.12f} "
            f"deviates from 1 by more than {settings.normalization_tol:.1e}"
        )
    return log_r, weights


def _truncation_index(weights: np.ndarray, tol: float) -> Optional[int]:
    running = 0.0
    streak = 0
    for index, term in enumerate(weights):
        running += term
        if term < tol * running:
            streak += 1
            if streak == STREAK_LENGTH:
                return index
        else:
            streak = 0
    return None


@lru_cache(maxsize=64)
def _cached_model(params: MftrParams, settings: SeriesSettings) -> MftrModel:
    return MftrModel(
        K=params.K,
        m=params.m,
        delta=params.delta,
        mu=params.mu,
        sigma2_half=1.0 / (params.mu * (params.K + 1)),
        settings=settings,
    )


def mftr_series_weights(model: MftrModel, tol: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
    """(gamma shapes, weights) of the mixture, cut where the remaining tail drops below tol."""
    if tol <= 0:
        return model.orders, model.weights
    tail = np.append(model.tail_mass(), 0.0)
    n = int(np.argmax(tail < tol))
    return model.orders[:n], model.weights[:n]


def build_mftr_model(
    params: MftrParams,
    config: Optional[ChannelConfig] = None,
    J_max: Optional[int] = None,
) -> MftrModel:
    """Cached model for a parameter set; the series is built on first use."""
    settings = SeriesSettings.from_config(config)
    if J_max is not None:
        settings = replace(settings, J_cap=J_max)
    return _cached_model(params, settings)


def _as_output(value: np.ndarray) -> ArrayLike:
    return float(value) if np.ndim(value) == 0 else value


def mftr_cdf(h: ArrayLike, model: MftrModel) -> ArrayLike:
    y = np.asarray(h, dtype=float) / model.sigma2_half
    if np.any(y < 0):
        raise ValueError("Fading gain must be >= 0")
    # Sum the lower regularized gammas: F(0) is exactly 0 this way.
    cdf = np.zeros_like(y)
    for weight, order in zip(model.weights, model.orders):
        cdf += weight * gammainc(order, y)
    return _as_output(np.clip(cdf, 0.0, 1.0))


def mftr_survival(h: ArrayLike, model: MftrModel) -> ArrayLike:
    y = np.asarray(h, dtype=float) / model.sigma2_half
    sf = np.zeros_like(y)
    for weight, order in zip(model.weights, model.orders):
        sf += weight * gammaincc(order, y)
    return _as_output(np.clip(sf, 0.0, 1.0))


def mftr_mean(model: MftrModel) -> float:
    return float(model.sigma2_half * np.dot(model.weights, model.orders))


def mftr_sample(
    model: MftrModel, rng: np.random.Generator, size=None
) -> ArrayLike:
    """Physical construction: two fluctuating specular rays plus mu diffuse clusters."""
    sigma = np.sqrt(model.sigma2_half / 2.0)
    omega = model.sigma2_half * model.mu * model.K
    spread = np.sqrt(1.0 - model.delta**2)
    v1 = np.sqrt(omega * (1.0 + spread) / 2.0)
    v2 = np.sqrt(omega * (1.0 - spread) / 2.0)

    zeta = rng.gamma(shape=model.m, scale=1.0 / model.m, size=size)
    phi1 = rng.uniform(0.0, 2.0 * np.pi, size=size)
    phi2 = rng.uniform(0.0, 2.0 * np.pi, size=size)
    diffuse = rng.normal(0.0, sigma, size=size) + 1j * rng.normal(0.0, sigma, size=size)

    dominant = np.sqrt(zeta) * (v1 * np.exp(1j * phi1) + v2 * np.exp(1j * phi2))
    h = np.abs(dominant + diffuse) ** 2
    if model.mu > 1:
        h = h + rng.gamma(shape=model.mu - 1, scale=model.sigma2_half, size=size)
    return _as_output(h)


def mftr_laplace_factor(s: ArrayLike, a: ArrayLike, model: MftrModel) -> ArrayLike:
    """E[exp(-s a H)] = sum_j w_j (1 + 2 sigma^2 s a)^-(j+mu)."""
    y = model.sigma2_half * np.asarray(s, dtype=float) * np.asarray(a, dtype=float)
    if np.any(y < 0):
        raise ValueError("s and a must be >= 0")
    log1p_y = np.log1p(y)
    value = np.zeros_like(y)
    for weight, order in zip(model.weights, model.orders):
        value += weight * np.exp(-order * log1p_y)
    return _as_output(value)


def mftr_laplace_complement(s: ArrayLike, a: ArrayLike, model: MftrModel) -> ArrayLike:
    """1 - E[exp(-s a H)], accurate when the factor is close to one."""
    y = model.sigma2_half * np.asarray(s, dtype=float) * np.asarray(a, dtype=float)
    log1p_y = np.log1p(y)
    value = np.zeros_like(y)
    for weight, order in zip(model.weights, model.orders):
        value -= weight * np.expm1(-order * log1p_y)
    return _as_output(value)


def mftr_laplace_factor_derivatives(
    s: float, a: ArrayLike, model: MftrModel, l_max: int
) -> np.ndarray:
    """
    d^k/ds^k E[exp(-s a H)] for k = 0..l_max, shape (l_max + 1,) + shape(a).

    Term j contributes w_j (-2 sigma^2 a)^k (j+mu)_k (1 + 2 sigma^2 s a)^-(j+mu+k).
    """
    if not 0 <= l_max <= MAX_RAW_DERIVATIVE_ORDER:
        raise ValueError(
            f"l_max must lie in [0, {MAX_RAW_DERIVATIVE_ORDER}], got {l_max}"
        )
    a = np.asarray(a, dtype=float)
    scale = model.sigma2_half * a.reshape(-1)
    base = 1.0 + scale * s
    orders = model.orders.astype(float)

    terms = np.exp(-np.outer(np.log(base), orders))
    derivatives = np.empty((l_max + 1, scale.size))
    derivatives[0] = terms @ model.weights
    step = (-scale / base)[:, None]
    for k in range(1, l_max + 1):
        terms *= step
        terms *= orders + (k - 1)
        derivatives[k] = terms @ model.weights
    return derivatives.reshape((l_max + 1,) + a.shape)


def mftr_poisson_coefficients(y: ArrayLike, model: MftrModel, k_max: int) -> np.ndarray:
    """
    c_k = E[(Y H')^k exp(-Y H') / k!] for k = 0..k_max, where Y H' = s a H and
    y = 2 sigma^2 s a. Equivalently c_k = (-s)^k/k! d^k/ds^k E[exp(-s a H)].

    Returns an array of shape (k_max + 1,) + shape(y). Each c_k is a negative
    binomial pmf mixed over the series weights, so it lies in [0, 1].
    """
    y = np.asarray(y, dtype=float)
    flat = y.reshape(-1)
    orders = model.orders.astype(float)
    x = flat / (1.0 + flat)

    pmf = np.exp(-np.outer(np.log1p(flat), orders))
    out = np.empty((k_max + 1, flat.size))
    out[0] = pmf @ model.weights
    for k in range(1, k_max + 1):
        pmf *= x[:, None]
        pmf *= (orders + (k - 1)) / k
        out[k] = pmf @ model.weights
    return out.reshape((k_max + 1,) + y.shape)
