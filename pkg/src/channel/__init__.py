"""
Large-scale path gain and MFTR small-scale fading.
"""

from .large_scale import LinkGain, large_scale_gain, path_weight
from .mftr import (
    CoefficientError,
    MftrModel,
    SeriesSettings,
    build_mftr_model,
    mftr_cdf,
    mftr_coefficients,
    mftr_laplace_complement,
    mftr_laplace_factor,
    mftr_laplace_factor_derivatives,
    mftr_mean,
    mftr_poisson_coefficients,
    mftr_sample,
    mftr_series_weights,
    mftr_survival,
)

__all__ = [
    "LinkGain",
    "large_scale_gain",
    "path_weight",
    "CoefficientError",
    "MftrModel",
    "SeriesSettings",
    "build_mftr_model",
    "mftr_cdf",
    "mftr_coefficients",
    "mftr_laplace_complement",
    "mftr_laplace_factor",
    "mftr_laplace_factor_derivatives",
    "mftr_mean",
    "mftr_poisson_coefficients",
    "mftr_sample",
    "mftr_series_weights",
    "mftr_survival",
]
