"""
Monte Carlo engine and conditional simulation oracles.
"""

from .conditional import (
    empirical_laplace,
    sample_conditional_interference,
    sample_los_interferer_distances,
    sample_nearest_los_distances,
    simulate_conditional_coverage,
)
from .engine import (
    MonteCarloEngine,
    coverage_from_sinr,
    estimate_coverage,
    trial_table_for_export,
    wilson_halfwidths,
)
from .rng import stream_rng, trial_rng
from .trial import NO_AP_RESULT, TrialResult, TrialSetup, run_trial

__all__ = [
    "empirical_laplace",
    "sample_conditional_interference",
    "sample_los_interferer_distances",
    "sample_nearest_los_distances",
    "simulate_conditional_coverage",
    "MonteCarloEngine",
    "coverage_from_sinr",
    "estimate_coverage",
    "trial_table_for_export",
    "wilson_halfwidths",
    "stream_rng",
    "trial_rng",
    "NO_AP_RESULT",
    "TrialResult",
    "TrialSetup",
    "run_trial",
]
