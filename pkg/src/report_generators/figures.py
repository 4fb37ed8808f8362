"""
Figure datasets: paired analytic and simulated curves over the axes of the
pointing-loss density, coverage-vs-threshold and coverage-vs-N_A plots.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..analytic.coverage import AnalyticEngine
from ..antenna.pointing import PointingModel, pointing_loss_pdf, sample_pointing_loss
from ..core.curves import parse_gamma_grid
from ..core.params import Scenario, with_updates
from ..simulate.engine import MonteCarloEngine
from ..simulate.rng import stream_rng
from ..utils.logger import LoggerMixin, log_execution_time

FIGURE_IDS = ("hpe-pdf", "coverage-vs-threshold", "coverage-vs-na")
DEFAULT_THRESHOLD_GRID = "-10:40:2"
DEFAULT_SIGMAS_DEG = (0.0, 0.5, 1.5)
ANTENNA_CONFIGS = ((16, 8), (32, 4))
ANTENNA_CONFIG_SIGMAS_DEG = (0.0, 1.5)
DEFAULT_NA_VALUES = (8, 16, 32, 64)
HPE_PDF_SIGMA_DEG = 1.5


def shape_summary(values: Sequence[float], halfwidths: Optional[Sequence[float]] = None) -> str:
    """
    Classify a curve as nondecreasing, nonincreasing, unimodal (interior
    peak) or irregular. Steps smaller than the combined CI half-widths
    count as flat.
    """
    v = np.asarray(values, dtype=float)
    hw = np.zeros_like(v) if halfwidths is None else np.asarray(halfwidths, dtype=float)
    if v.size < 2:
        return "nondecreasing"
    margin = hw[:-1] + hw[1:]
    step = np.diff(v)
    up = step > margin
    down = step < -margin

    peak = int(np.argmax(v))
    if 0 < peak < v.size - 1 and not down[:peak].any() and not up[peak:].any() and down[peak:].any():
        return "unimodal"
    if not down.any():
        return "nondecreasing"
    if not up.any():
        return "nonincreasing"
    return "irregular"


@dataclass
class FigureOptions:
    n_trials: int
    seed: int
    workers: Optional[int] = None
    blockage_mode: Optional[str] = None
    pointing_mode: Optional[str] = None
    gamma_grid_db: Optional[np.ndarray] = None
    n_draws: int = 1_000_000
    bins: int = 50
    show_progress: bool = False


class FigureBuilder(LoggerMixin):
    def __init__(self, scenario: Scenario, options: FigureOptions):
        super().__init__()
        self.scenario = scenario
        self.options = options

    def build(self, figure_id: str) -> Tuple[pd.DataFrame, str, List[float]]:
        """Dataset for one figure plus its sweep axis name and values."""
        if figure_id == "hpe-pdf":
            frame = self.hpe_pdf()
            return frame, "h_pe", sorted(frame["h_pe"].unique().tolist())
        if figure_id == "coverage-vs-threshold":
            frame = self.coverage_vs_threshold()
            return frame, "gamma_db", sorted(frame["gamma_db"].unique().tolist())
        if figure_id == "coverage-vs-na":
            return self.coverage_vs_na(), "n_a", [float(n) for n in DEFAULT_NA_VALUES]
        raise ValueError(f"Unknown figure id: {figure_id} (choose from {', '.join(FIGURE_IDS)})")

    def _engines(self, s: Scenario) -> Tuple[AnalyticEngine, MonteCarloEngine]:
        opts = self.options
        analytic = AnalyticEngine(s, workers=opts.workers, show_progress=opts.show_progress)
        simulated = MonteCarloEngine(
            s,
            blockage_mode=opts.blockage_mode,
            pointing_mode=opts.pointing_mode,
            workers=opts.workers,
            show_progress=opts.show_progress,
        )
        return analytic, simulated

    @log_execution_time
    def hpe_pdf(self, n_a_values: Sequence[int] = (16, 32)) -> pd.DataFrame:
        sigma_deg = self.scenario.sigma_theta_deg or HPE_PDF_SIGMA_DEG
        if not self.scenario.has_pointing_error:
            self.log_info(f"Scenario has no pointing error; using {sigma_deg} deg")
        edges = np.linspace(0.0, 1.0, self.options.bins + 1)
        centers = 0.5 * (edges[:-1] + edges[1:])

        frames = []
        for index, n_a in enumerate(n_a_values):
            s = with_updates(self.scenario, N_A=int(n_a), sigma_theta_deg=sigma_deg)
            exact = PointingModel.from_scenario(s, mode="exact")
            draws = np.asarray(
                sample_pointing_loss(exact, stream_rng(self.options.seed, index), self.options.n_draws)
            )
            empirical, _ = np.histogram(draws, bins=edges, density=True)
            analytic = pointing_loss_pdf(centers, PointingModel.from_scenario(s))
            frames.append(
                pd.DataFrame(
                    {
                        "h_pe": centers,
                        "pdf_analytic": analytic,
                        "pdf_empirical": empirical,
                        "n_a": int(n_a),
                    }
                )
            )
        return pd.concat(frames, ignore_index=True)

    def _paired_curve(self, s: Scenario, gamma_db: np.ndarray) -> pd.DataFrame:
        analytic, simulated = self._engines(s)
        a = analytic.evaluate(gamma_db)
        m = simulated.evaluate(gamma_db, self.options.n_trials, self.options.seed)
        return pd.DataFrame(
            {
                "sigma_theta_deg": s.sigma_theta_deg,
                "n_a": s.N_A,
                "n_u": s.N_U,
                "gamma_db": gamma_db,
                "coverage_analytic": a.values,
                "coverage_simulated": m.values,
                "ci_halfwidth": m.ci_halfwidth,
            }
        )

    @log_execution_time
    def coverage_vs_threshold(self) -> pd.DataFrame:
        gamma_db = self.options.gamma_grid_db
        if gamma_db is None:
            gamma_db = parse_gamma_grid(DEFAULT_THRESHOLD_GRID)

        configs = [(sigma, self.scenario.N_A, self.scenario.N_U) for sigma in DEFAULT_SIGMAS_DEG]
        configs += [
            (sigma, n_a, n_u) for n_a, n_u in ANTENNA_CONFIGS for sigma in ANTENNA_CONFIG_SIGMAS_DEG
        ]
        frames = []
        for sigma, n_a, n_u in configs:
            self.log_info(f"coverage-vs-threshold: sigma={sigma} deg, N_A={n_a}, N_U={n_u}")
            s = with_updates(self.scenario, sigma_theta_deg=sigma, N_A=n_a, N_U=n_u)
            frames.append(self._paired_curve(s, np.asarray(gamma_db, dtype=float)))
        return pd.concat(frames, ignore_index=True)

    @log_execution_time
    def coverage_vs_na(
        self,
        n_a_values: Sequence[int] = DEFAULT_NA_VALUES,
        sigmas_deg: Sequence[float] = DEFAULT_SIGMAS_DEG,
        gamma_db: float = 30.0,
    ) -> pd.DataFrame:
        rows = []
        summaries = []
        for sigma in sigmas_deg:
            points = []
            for n_a in n_a_values:
                s = with_updates(self.scenario, sigma_theta_deg=sigma, N_A=int(n_a))
                points.append(self._paired_curve(s, np.array([gamma_db])).iloc[0])
            block = pd.DataFrame(points)
            block["row_type"] = "point"
            block["shape"] = ""
            rows.append(block)

            if sigma > 0:
                simulated = block["coverage_simulated"].to_numpy()
                peak = int(np.argmax(simulated))
                summaries.append(
                    {
                        "row_type": "summary",
                        "sigma_theta_deg": sigma,
                        "n_a": int(n_a_values[peak]),
                        "n_u": self.scenario.N_U,
                        "gamma_db": gamma_db,
                        "coverage_analytic": float(np.max(block["coverage_analytic"])),
                        "coverage_simulated": float(simulated[peak]),
                        "ci_halfwidth": float(block["ci_halfwidth"].iloc[peak]),
                        "shape": shape_summary(simulated, block["ci_halfwidth"].to_numpy()),
                    }
                )

        if summaries:
            rows.append(pd.DataFrame(summaries))
        frame = pd.concat(rows, ignore_index=True)
        frame["n_a"] = frame["n_a"].astype(int)
        columns = [
            "row_type",
            "sigma_theta_deg",
            "n_a",
            "n_u",
            "gamma_db",
            "coverage_analytic",
            "coverage_simulated",
            "ci_halfwidth",
            "shape",
        ]
        return frame[columns]
