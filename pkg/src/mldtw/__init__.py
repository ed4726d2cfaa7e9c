"""Exact, banded and learned-region dynamic time warping."""

from .banded import (
    SearchRegion,
    banded_dtw,
    constrained_cost_matrix,
    constrained_dtw,
    sakoe_chiba_region,
)
from .core import (
    Alignment,
    CostMatrix,
    TimeSeries,
    WarpPath,
    backtrack,
    full_cost_matrix,
    full_dtw,
    point_distance,
)
from .pipeline import WaypointModelSet, ml_dtw, percent_error

__all__ = [
    "Alignment",
    "CostMatrix",
    "SearchRegion",
    "TimeSeries",
    "WarpPath",
    "WaypointModelSet",
    "backtrack",
    "banded_dtw",
    "constrained_cost_matrix",
    "constrained_dtw",
    "full_cost_matrix",
    "full_dtw",
    "ml_dtw",
    "percent_error",
    "point_distance",
    "sakoe_chiba_region",
]
