"""Coverage probability of the typical UE: conditional coverage and the outer average."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from typing import Dict, List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from ..channel.large_scale import path_weight
from ..antenna.cone import beam_geometry
from ..channel.mftr import MftrModel, build_mftr_model, mftr_series_weights
from ..core.curves import CoverageCurve, db_to_linear
from ..core.params import DerivedConstants, Scenario, derive_constants
from ..utils.config import get_config
from ..utils.logger import LoggerMixin, log_execution_time
from .laplace import InterferenceGrid, interference_grid, scaled_laplace_coefficients
from .quadrature import OuterNodes, QuadratureSpec, interference_cutoff, outer_nodes


class SeriesConvergenceError(RuntimeError):
    """The fading series needs more Laplace derivatives than allowed."""


class ClampError(RuntimeError):
    """A probability left [0, 1] by more than numerical noise."""


def retained_terms(model: MftrModel, tol: float) -> int:
    """Smallest n such that the series weights beyond index n-1 sum below ``tol``."""
    return int(mftr_series_weights(model, tol)[1].size)


def threshold_scale(
    h_pe: float, d0: float, gamma_th: float, c: DerivedConstants, s: Scenario, model: MftrModel
) -> float:
    """rho = gamma / (2 sigma^2 P_t xi G_max h_pe W(d0))."""
    signal = c.P_t_lin * c.xi * c.G_max * h_pe * path_weight(d0, c, s)
    return gamma_th / (model.sigma2_half * signal)


def _clamp(value: float, tol: float) -> float:
    if value < -tol or value > 1 + tol:
        raise ClampError(f"Coverage value {value:.3e} outside [0, 1] beyond {tol:.0e}")
    return min(max(value, 0.0), 1.0)


def conditional_coverage(
    h_pe: float,
    d0: float,
    gamma_th: float,
    c: DerivedConstants,
    s: Scenario,
    model: MftrModel,
    spec: Optional[QuadratureSpec] = None,
    grid: Optional[InterferenceGrid] = None,
) -> float:
    """P(SINR > gamma_th | h_pe, d0) with gamma_th linear."""
    if not 0 < h_pe <= 1:
        raise ValueError(f"h_pe must lie in (0, 1], got {h_pe}")
    if gamma_th <= 0 or d0 < 0:
        raise ValueError("gamma_th must be > 0 and d0 >= 0")
    spec = spec or QuadratureSpec()
    grid = grid or interference_grid(d0, c, s, spec)

    orders, weights = mftr_series_weights(model, spec.series_tol)
    l_max = int(orders[-1]) - 1
    if l_max > spec.l_cap:
        raise SeriesConvergenceError(
            f"Coverage series needs {l_max} Laplace derivatives (cap {spec.l_cap})"
        )

    rho = threshold_scale(h_pe, d0, gamma_th, c, s, model)
    if spec.printed_rho:
        value = 0.0
        for weight, order in zip(weights, orders):
            coeffs = scaled_laplace_coefficients(order * rho, grid, c, model, order - 1)
            value += weight * float(np.sum(coeffs))
    else:
        partial = np.cumsum(scaled_laplace_coefficients(rho, grid, c, model, l_max))
        value = float(np.dot(weights, partial[orders - 1]))
    return _clamp(value, spec.clamp_tol)


def _d0_node_task(args) -> np.ndarray:
    """Pointing-averaged conditional coverage at one d0 node for every threshold."""
    d0, h_nodes, h_weights, gammas, c, s, model, spec = args
    grid = interference_grid(d0, c, s, spec)
    out = np.zeros(len(gammas))
    for h, h_weight in zip(h_nodes, h_weights):
        for i, gamma in enumerate(gammas):
            out[i] += h_weight * conditional_coverage(h, d0, gamma, c, s, model, spec, grid)
    return out


def coverage_probability(
    gamma_th: float,
    c: DerivedConstants,
    s: Scenario,
    model: MftrModel,
    spec: Optional[QuadratureSpec] = None,
    nodes: Optional[OuterNodes] = None,
) -> float:
    """P(SINR > gamma_th) for the typical UE, gamma_th linear."""
    spec = spec or QuadratureSpec()
    nodes = nodes or outer_nodes(c, s, spec)
    total = 0.0
    for d0, weight in zip(nodes.d0, nodes.d0_weights):
        task = (d0, nodes.h_pe, nodes.h_weights, [gamma_th], c, s, model, spec)
        total += weight * float(_d0_node_task(task)[0])
    return _clamp(total, spec.clamp_tol)


class AnalyticEngine(LoggerMixin):
    """Evaluates coverage curves from the closed-form expressions."""

    def __init__(
        self,
        scenario: Scenario,
        spec: Optional[QuadratureSpec] = None,
        workers: Optional[int] = None,
        show_progress: Optional[bool] = None,
        model: Optional[MftrModel] = None,
    ):
        super().__init__()
        self.config = get_config()
        self.scenario = scenario
        self.constants = derive_constants(scenario)
        self.spec = spec or QuadratureSpec.from_config(self.config.quadrature)
        self.workers = workers or self.config.simulation.workers
        self.show_progress = (
            self.config.development.show_progress if show_progress is None else show_progress
        )
        self.model = model or build_mftr_model(scenario.mftr, self.config.channel)
        # built here so worker processes receive the finished series
        self.log_debug(f"Fading series: {self.model.weights.size} terms")

        if self.constants.blockage_rate <= 0:
            raise ValueError("Analytic engine needs alpha + eta > 0")

    def metadata(self, nodes: OuterNodes) -> Dict[str, object]:
        n_terms = retained_terms(self.model, self.spec.series_tol)
        return {
            "engine": "analytic",
            "interference_cutoff_m": interference_cutoff(self.constants, self.spec.cutoff_rel),
            "d0_max_node_m": nodes.d_max,
            "series_terms_cached": int(self.model.weights.size),
            "series_terms_used": n_terms,
            "laplace_order_max": int(n_terms - 1 + self.model.mu - 1),
            "series_weight_sum": float(np.sum(self.model.weights)),
            "series_tol": self.spec.series_tol,
            "cutoff_rel": self.spec.cutoff_rel,
            "d0_nodes": self.spec.d0_nodes,
            "hpe_nodes": int(nodes.h_pe.size),
            "panel_nodes": self.spec.panel_nodes,
            "rho_form": "printed" if self.spec.printed_rho else "expansion",
            "interferer_gains": "cone-model pmf",
            "beamwidths_rad": asdict(beam_geometry(self.constants)),
        }

    @log_execution_time
    def evaluate(self, gamma_grid_db: Sequence[float]) -> CoverageCurve:
        gamma_db = np.asarray(gamma_grid_db, dtype=float)
        gammas = db_to_linear(gamma_db)
        nodes = outer_nodes(self.constants, self.scenario, self.spec)
        self.log_info(
            f"Analytic coverage: {gamma_db.size} thresholds, {nodes.d0.size} x "
            f"{nodes.h_pe.size} outer nodes, {self.workers} worker(s)"
        )

        tasks = [
            (d0, nodes.h_pe, nodes.h_weights, gammas, self.constants, self.scenario,
             self.model, self.spec)
            for d0 in nodes.d0
        ]
        try:
            per_node = self._run_tasks(tasks)
        except Exception as e:
            self.log_error(f"Analytic evaluation failed: {e}")
            raise

        for d0, weight, row in zip(nodes.d0, nodes.d0_weights, per_node):
            self.log_debug(
                f"d0 = {d0:.3f} m, weight {weight:.3e}, conditional max {np.max(row):.4f}"
            )
        values = np.clip(nodes.d0_weights @ np.vstack(per_node), 0.0, 1.0)
        return CoverageCurve(
            gamma_grid=gamma_db,
            values=values,
            provenance="analytic",
            metadata=self.metadata(nodes),
        )

    def _run_tasks(self, tasks: List[tuple]) -> List[np.ndarray]:
        progress = tqdm(
            total=len(tasks), desc="analytic d0 nodes", disable=not self.show_progress
        )
        results: List[Optional[np.ndarray]] = [None] * len(tasks)
        try:
            if self.workers <= 1:
                for index, task in enumerate(tasks):
                    results[index] = _d0_node_task(task)
                    progress.update(1)
            else:
                with ProcessPoolExecutor(max_workers=self.workers) as pool:
                    for index, result in enumerate(pool.map(_d0_node_task, tasks)):
                        results[index] = result
                        progress.update(1)
        finally:
            progress.close()
        return results  # type: ignore[return-value]


def coverage_curve(
    scenario: Scenario,
    gamma_grid_db: Sequence[float],
    spec: Optional[QuadratureSpec] = None,
    workers: Optional[int] = None,
) -> CoverageCurve:
    return AnalyticEngine(scenario, spec=spec, workers=workers, show_progress=False).evaluate(
        gamma_grid_db
    )
