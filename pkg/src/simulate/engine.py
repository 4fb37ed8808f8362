"""Monte Carlo coverage engine: parallel trials, shared-trial threshold sweep."""

from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import stats
from tqdm import tqdm

from ..channel.mftr import MftrModel, build_mftr_model
from ..core.curves import CoverageCurve, db_to_linear
from ..core.params import DerivedConstants, Scenario, derive_constants
from ..utils.config import get_config
from ..utils.logger import LoggerMixin, log_execution_time
from .rng import trial_rng
from .trial import TrialSetup, run_trial

TRIAL_COLUMNS = ["d0", "n_los_aps", "h_pe", "signal_mW", "interference_mW", "sinr"]


def _run_chunk(task: Tuple) -> np.ndarray:
    start, stop, seed, s, c, setup, blockage_mode, pointing_mode = task
    rows = np.full((stop - start, len(TRIAL_COLUMNS)), np.nan)
    for offset, index in enumerate(range(start, stop)):
        result = run_trial(
            s, c, trial_rng(seed, index), blockage_mode, pointing_mode, setup
        )
        rows[offset, 1] = result.n_los_aps
        rows[offset, 3] = result.signal_mW
        rows[offset, 4] = result.interference_mW
        if result.has_serving_ap:
            rows[offset, 0] = result.d0
            rows[offset, 2] = result.h_pe
            rows[offset, 5] = result.sinr
    return rows


def wilson_halfwidths(
    successes: np.ndarray, n_trials: int, confidence: float = 0.95
) -> np.ndarray:
    halfwidths = []
    for k in successes:
        ci = stats.binomtest(int(k), n_trials).proportion_ci(
            confidence_level=confidence, method="wilson"
        )
        halfwidths.append((ci.high - ci.low) / 2.0)
    return np.array(halfwidths)


def coverage_from_sinr(
    sinr: np.ndarray, gamma_grid_db: Sequence[float], confidence: float = 0.95
) -> Tuple[np.ndarray, np.ndarray]:
    """Coverage fractions over one set of SINR samples; NaN (no serving AP) never covers."""
    sinr = np.asarray(sinr, dtype=float)
    gammas = db_to_linear(gamma_grid_db)
    with np.errstate(invalid="ignore"):
        successes = np.sum(sinr[:, None] > gammas[None, :], axis=0)
    n = sinr.size
    return successes / n, wilson_halfwidths(successes, n, confidence)


class MonteCarloEngine(LoggerMixin):
    """Estimates coverage by simulating the full downlink."""

    def __init__(
        self,
        scenario: Scenario,
        blockage_mode: Optional[str] = None,
        pointing_mode: Optional[str] = None,
        workers: Optional[int] = None,
        chunk_size: Optional[int] = None,
        show_progress: Optional[bool] = None,
        model: Optional[MftrModel] = None,
    ):
        super().__init__()
        self.config = get_config()
        sim = self.config.simulation
        self.scenario = scenario
        self.constants: DerivedConstants = derive_constants(scenario)
        self.blockage_mode = blockage_mode or sim.blockage_mode
        self.pointing_mode = pointing_mode or sim.pointing_mode
        self.workers = workers or sim.workers
        self.chunk_size = chunk_size or sim.chunk_size
        self.show_progress = (
            self.config.development.show_progress if show_progress is None else show_progress
        )
        self.model = model or build_mftr_model(scenario.mftr, self.config.channel)
        self.setup = TrialSetup.build(
            scenario, self.constants, self.model, self.pointing_mode
        )
        self.last_trials: Optional[pd.DataFrame] = None

    def _tasks(self, n_trials: int, seed: int) -> List[Tuple]:
        return [
            (
                start,
                min(start + self.chunk_size, n_trials),
                seed,
                self.scenario,
                self.constants,
                self.setup,
                self.blockage_mode,
                self.pointing_mode,
            )
            for start in range(0, n_trials, self.chunk_size)
        ]

    def run_trials(self, n_trials: int, seed: int) -> pd.DataFrame:
        """Per-trial table indexed by trial number; chunking never changes the values."""
        if seed is None:
            raise ValueError("A seed is required for Monte Carlo runs")
        tasks = self._tasks(n_trials, seed)
        self.log_debug(f"{n_trials} trials in {len(tasks)} chunk(s) of up to {self.chunk_size}")
        progress = tqdm(total=n_trials, desc="trials", disable=not self.show_progress)
        chunks: List[Optional[np.ndarray]] = [None] * len(tasks)
        try:
            if self.workers <= 1:
                for index, task in enumerate(tasks):
                    chunks[index] = _run_chunk(task)
                    progress.update(task[1] - task[0])
            else:
                with ProcessPoolExecutor(max_workers=self.workers) as pool:
                    for index, rows in enumerate(pool.map(_run_chunk, tasks)):
                        chunks[index] = rows
                        progress.update(rows.shape[0])
        except Exception as e:
            self.log_error(f"Monte Carlo run failed: {e}")
            raise
        finally:
            progress.close()

        table = pd.DataFrame(np.vstack(chunks), columns=TRIAL_COLUMNS)
        table.index.name = "trial"
        table["n_los_aps"] = table["n_los_aps"].astype(int)
        return table

    @log_execution_time
    def evaluate(
        self, gamma_grid_db: Sequence[float], n_trials: int, seed: int
    ) -> CoverageCurve:
        minimum = self.config.simulation.min_trials
        if n_trials < minimum:
            raise ValueError(f"n_trials must be >= {minimum}, got {n_trials}")
        self.log_info(
            f"Monte Carlo coverage: {n_trials} trials, seed {seed}, "
            f"{self.blockage_mode} blockage, {self.pointing_mode} pointing, "
            f"{self.workers} worker(s)"
        )
        trials = self.run_trials(n_trials, seed)
        self.last_trials = trials

        confidence = self.config.simulation.confidence_level
        values, halfwidths = coverage_from_sinr(
            trials["sinr"].to_numpy(), gamma_grid_db, confidence
        )
        no_ap = int(trials["d0"].isna().sum())
        if no_ap:
            self.log_warning(f"{no_ap} trial(s) had no LoS AP and count as uncovered")

        return CoverageCurve(
            gamma_grid=np.asarray(gamma_grid_db, dtype=float),
            values=values,
            provenance="monte-carlo",
            ci_halfwidth=halfwidths,
            metadata={
                "engine": "monte-carlo",
                "n_trials": n_trials,
                "seed": seed,
                "blockage_mode": self.blockage_mode,
                "pointing_mode": self.pointing_mode,
                "sim_radius_m": self.constants.sim_radius,
                "confidence_level": confidence,
                "trials_without_los_ap": no_ap,
                "interferer_gains": "cone-model pmf, independent Bernoulli hits",
                "rng": "Philox, one counter block per trial",
            },
        )


def trial_table_for_export(trials: pd.DataFrame) -> pd.DataFrame:
    """Columns of the per-trial dump: trial, d0, n_los_aps, h_pe, powers, sinr_dB."""
    export = trials.drop(columns=["sinr"]).copy()
    with np.errstate(divide="ignore"):
        export["sinr_dB"] = 10 * np.log10(trials["sinr"])
    return export.reset_index()


def estimate_coverage(
    s: Scenario,
    gamma_grid_db: Sequence[float],
    n_trials: int,
    seed: int,
    blockage_mode: Optional[str] = None,
    pointing_mode: Optional[str] = None,
    workers: Optional[int] = None,
) -> CoverageCurve:
    engine = MonteCarloEngine(
        s,
        blockage_mode=blockage_mode,
        pointing_mode=pointing_mode,
        workers=workers,
        show_progress=False,
    )
    return engine.evaluate(gamma_grid_db, n_trials, seed)
