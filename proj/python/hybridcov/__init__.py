"""Hybrid Cauchy-Matern and hole-effect covariance models."""

from ._core import (
    FactorizationError,
    Kernel,
    aic,
    covariance_matrix,
    fit,
    gaussian_scores,
    krige,
    loo_cv,
    neg_log_likelihood,
    simulate,
    tail_exponent,
    uniform_locations,
)

__version__ = "0.1.0"

__all__ = [
    "FactorizationError",
    "Kernel",
    "aic",
    "covariance_matrix",
    "fit",
    "gaussian_scores",
    "krige",
    "loo_cv",
    "neg_log_likelihood",
    "simulate",
    "tail_exponent",
    "uniform_locations",
]
