"""
Array patterns, pointing-error loss and cone-model interferer gains.
"""

from .cone import (
    BeamGeometry,
    ConeGains,
    ConeModelError,
    GainPmf,
    ap_hit_probabilities,
    beam_geometry,
    cone_gains,
    gain_probability_table,
    interferer_gain_pmf,
    interferer_hit_probabilities,
    r_u0_max,
    side_lobe_gain,
    ue_horizontal_hit_probability,
)
from .pointing import (
    DegeneratePointingError,
    PointingModel,
    array_factor,
    gaussian_beam,
    mean_effective_gain,
    mean_gain_limit,
    pointing_loss_cdf,
    pointing_loss_pdf,
    sample_pointing_loss,
)

__all__ = [
    "BeamGeometry",
    "ConeGains",
    "ConeModelError",
    "GainPmf",
    "ap_hit_probabilities",
    "beam_geometry",
    "cone_gains",
    "gain_probability_table",
    "interferer_gain_pmf",
    "interferer_hit_probabilities",
    "r_u0_max",
    "side_lobe_gain",
    "ue_horizontal_hit_probability",
    "DegeneratePointingError",
    "PointingModel",
    "array_factor",
    "gaussian_beam",
    "mean_effective_gain",
    "mean_gain_limit",
    "pointing_loss_cdf",
    "pointing_loss_pdf",
    "sample_pointing_loss",
]
