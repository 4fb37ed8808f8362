"""
Scenario model and derived constants.
"""

from .params import (
    DerivedConstants,
    MftrParams,
    Scenario,
    ScenarioError,
    apply_overrides,
    derive_constants,
    load_scenario,
    load_scenario_file,
    serialize_scenario,
)
from .curves import CoverageCurve, GridMismatchError, compare_curves, parse_gamma_grid

__all__ = [
    "CoverageCurve",
    "GridMismatchError",
    "compare_curves",
    "parse_gamma_grid",
    "DerivedConstants",
    "MftrParams",
    "Scenario",
    "ScenarioError",
    "apply_overrides",
    "derive_constants",
    "load_scenario",
    "load_scenario_file",
    "serialize_scenario",
]
