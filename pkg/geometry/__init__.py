"""
Point-set primitives: spatial queries, farthest point sampling and splatting.
"""

from .raster import splat_disc_mask
from .sampling import farthest_point_sampling, fps_indices
from .spatial import (
    SpatialIndex,
    build_index,
    furthest_distance,
    mean_distance,
    nearest_distance,
    point_distances,
)

__all__ = [
    "SpatialIndex",
    "build_index",
    "farthest_point_sampling",
    "fps_indices",
    "furthest_distance",
    "mean_distance",
    "nearest_distance",
    "point_distances",
    "splat_disc_mask",
]
