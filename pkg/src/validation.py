"""
Quick property checks behind the ``validate`` command. Each check runs in
seconds with a fixed seed and reports its measured value against a bound.
"""

import math
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Optional

import numpy as np
from scipy import stats

from .analytic.laplace import laplace_derivatives
from .antenna.pointing import PointingModel, pointing_loss_cdf, sample_pointing_loss
from .channel.mftr import MftrModel, build_mftr_model, mftr_mean, mftr_sample
from .core.params import DerivedConstants, Scenario, derive_constants, with_updates
from .geometry.blockage import los_probability, nearest_los_cdf
from .geometry.scene import is_los_many, sample_blockage_field, wall_margin
from .simulate.conditional import sample_nearest_los_distances
from .simulate.rng import stream_rng
from .utils.logger import LoggerMixin, log_execution_time

FALLBACK_SIGMA_DEG = 1.5


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    bound: float
    detail: str = ""


class PropertySuite(LoggerMixin):
    def __init__(self, scenario: Scenario, seed: int = 0, scale: float = 1.0):
        super().__init__()
        self.scenario = scenario
        self.constants: DerivedConstants = derive_constants(scenario)
        self.model: MftrModel = build_mftr_model(scenario.mftr)
        self.seed = seed
        self.scale = scale

    def _draws(self, n: int) -> int:
        return max(1000, int(n * self.scale))

    def check_series_normalization(self) -> CheckResult:
        deviation = abs(float(np.sum(self.model.weights)) - 1.0)
        return CheckResult(
            "series_normalization",
            deviation <= 1e-8,
            deviation,
            1e-8,
            f"{self.model.weights.size} terms",
        )

    def check_fading_mean(self) -> CheckResult:
        n = self._draws(200_000)
        samples = mftr_sample(self.model, stream_rng(self.seed, 1), size=n)
        error = abs(float(np.mean(samples)) - mftr_mean(self.model))
        return CheckResult("fading_mean", error <= 0.01, error, 0.01, f"{n} draws")

    def check_laplace_at_zero(self) -> CheckResult:
        value = laplace_derivatives(0.0, 5.0, 0, self.constants, self.scenario, self.model)[0]
        error = abs(float(value) - 1.0)
        return CheckResult("laplace_at_zero", error <= 1e-9, error, 1e-9, "d0 = 5 m")

    def check_pointing_power_law(self) -> CheckResult:
        sigma = self.scenario.sigma_theta_deg or FALLBACK_SIGMA_DEG
        s = with_updates(self.scenario, sigma_theta_deg=sigma)
        model = PointingModel.from_scenario(s, mode="gaussian")
        n = self._draws(200_000)
        draws = sample_pointing_loss(model, stream_rng(self.seed, 2), n)
        statistic = stats.kstest(draws, lambda h: pointing_loss_cdf(h, model)).statistic
        return CheckResult(
            "pointing_power_law",
            statistic <= 0.005,
            float(statistic),
            0.005,
            f"sigma = {sigma} deg, beta = {model.beta:.4g}, {n} draws",
        )

    def check_los_fraction(self, d: float = 10.0) -> CheckResult:
        n = self._draws(20_000)
        rng = stream_rng(self.seed, 3)
        margin = wall_margin(self.scenario) + self.scenario.R_B
        hits = 0
        for _ in range(n):
            # walls are axis-aligned, so the link direction must be random
            angle = rng.uniform(0.0, 2 * math.pi)
            point = np.array([[d * math.cos(angle), d * math.sin(angle)]])
            field = sample_blockage_field(self.scenario, rng, radius=d, margin=margin)
            hits += bool(is_los_many(point, field, self.scenario)[0])
        expected = float(los_probability(d, self.constants))
        se = math.sqrt(expected * (1 - expected) / n)
        z = abs(hits / n - expected) / se if se > 0 else 0.0
        return CheckResult(
            "los_fraction",
            z <= 3.0,
            z,
            3.0,
            f"d = {d} m, empirical {hits / n:.4f} vs {expected:.4f} over {n} links",
        )

    def check_nearest_los_distance(self) -> CheckResult:
        n = self._draws(5_000)
        distances = sample_nearest_los_distances(
            n, stream_rng(self.seed, 4), self.scenario, self.constants
        )
        distances = distances[np.isfinite(distances)]
        statistic = stats.kstest(
            distances, lambda x: nearest_los_cdf(x, self.constants, self.scenario)
        ).statistic
        bound = 1.63 / math.sqrt(max(distances.size, 1))
        return CheckResult(
            "nearest_los_distance",
            statistic <= bound,
            float(statistic),
            bound,
            f"{distances.size} realizations, thinned blockage",
        )

    def checks(self) -> List[Callable[[], CheckResult]]:
        return [
            self.check_series_normalization,
            self.check_fading_mean,
            self.check_laplace_at_zero,
            self.check_pointing_power_law,
            self.check_los_fraction,
            self.check_nearest_los_distance,
        ]

    @log_execution_time
    def run(self, names: Optional[List[str]] = None) -> Dict[str, object]:
        known = [check.__name__.replace("check_", "", 1) for check in self.checks()]
        unknown = sorted(set(names or []) - set(known))
        if unknown:
            raise ValueError(f"Unknown check(s): {', '.join(unknown)} (choose from {', '.join(known)})")

        results = []
        for check in self.checks():
            name = check.__name__.replace("check_", "", 1)
            if names and name not in names:
                continue
            try:
                result = check()
            except Exception as e:
                self.log_error(f"{check.__name__} raised: {e}")
                result = CheckResult(name, False, math.nan, math.nan, str(e))
            status = "PASS" if result.passed else "FAIL"
            self.log_info(f"{status} {result.name}: {result.value:.4g} (bound {result.bound:.4g})")
            results.append(result)

        return {
            "seed": self.seed,
            "passed": all(r.passed for r in results),
            "checks": [asdict(r) for r in results],
        }
