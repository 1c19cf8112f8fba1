"""Restricted maxima of non-intersecting Brownian bridges: exact CDFs, identity checks and samplers."""

from .fredholm import (
    CdfCurve,
    limit_cdf_hermite,
    limit_cdf_laguerre,
    limit_cdf_matrix,
    lue_cdf,
    restricted_max_cdf,
)
from .montecarlo import MatrixBridgeConfig, SampleBatch

__all__ = [
    "CdfCurve",
    "MatrixBridgeConfig",
    "SampleBatch",
    "limit_cdf_hermite",
    "limit_cdf_laguerre",
    "limit_cdf_matrix",
    "lue_cdf",
    "restricted_max_cdf",
]

__version__ = "0.1.0"
