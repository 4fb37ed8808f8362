"""
Point processes, blockage laws and explicit scene realizations.
"""

from .blockage import (
    human_los_probability,
    los_intensity,
    los_mass,
    los_mass_limit,
    los_probability,
    mean_nearest_los_distance,
    nearest_los_cdf,
    nearest_los_pdf,
    nearest_los_quantile,
    wall_los_probability,
)
from .scene import (
    ApField,
    BlockageField,
    is_los,
    is_los_many,
    sample_ap_field,
    sample_blockage_field,
    sample_los_mask,
    scene_to_dict,
    wall_margin,
)

__all__ = [
    "human_los_probability",
    "los_intensity",
    "los_mass",
    "los_mass_limit",
    "los_probability",
    "mean_nearest_los_distance",
    "nearest_los_cdf",
    "nearest_los_pdf",
    "nearest_los_quantile",
    "wall_los_probability",
    "ApField",
    "BlockageField",
    "is_los",
    "is_los_many",
    "sample_ap_field",
    "sample_blockage_field",
    "sample_los_mask",
    "scene_to_dict",
    "wall_margin",
]
