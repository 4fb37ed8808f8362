"""
Closed-form coverage evaluation: Laplace transform of interference plus noise,
conditional coverage and the outer average over pointing loss and distance.
"""

from .coverage import (
    AnalyticEngine,
    ClampError,
    SeriesConvergenceError,
    conditional_coverage,
    coverage_curve,
    coverage_probability,
    retained_terms,
    threshold_scale,
)
from .laplace import (
    InterferenceGrid,
    QuadratureError,
    interference_grid,
    laplace_derivatives,
    laplace_interference,
    mean_interference,
    scaled_laplace_coefficients,
)
from .quadrature import OuterNodes, QuadratureSpec, interference_cutoff, outer_nodes

__all__ = [
    "AnalyticEngine",
    "ClampError",
    "SeriesConvergenceError",
    "conditional_coverage",
    "coverage_curve",
    "coverage_probability",
    "retained_terms",
    "threshold_scale",
    "InterferenceGrid",
    "QuadratureError",
    "interference_grid",
    "laplace_derivatives",
    "laplace_interference",
    "mean_interference",
    "scaled_laplace_coefficients",
    "OuterNodes",
    "QuadratureSpec",
    "interference_cutoff",
    "outer_nodes",
]
