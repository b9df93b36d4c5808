"""
Farthest Point Sampling.
"""

import numpy as np

from errors import InvalidArgumentError
from geometry.spatial import point_distances
from schemas.models import PointSet2D


def fps_indices(points: np.ndarray, k: int, start_index: int = 0) -> np.ndarray:
    """
    Greedy farthest point sampling.

    Args:
        points: (N, 2) array
        k: Number of points to select, 1 <= k <= N
        start_index: Index of the first selected point

    Returns:
        Selected indices in selection order; ties go to the lowest index
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    n = points.shape[0]
    if not 1 <= k <= n:
        raise InvalidArgumentError(f"k must lie in [1, {n}], got {k}")
    if not 0 <= start_index < n:
        raise InvalidArgumentError(f"start_index {start_index} out of range for {n} points")

    selected = np.empty(k, dtype=np.int64)
    selected[0] = start_index
    min_dist = point_distances(points, points[start_index])
    min_dist[start_index] = -1.0  # selected points stay below every candidate
    for step in range(1, k):
        chosen = int(np.argmax(min_dist))
        selected[step] = chosen
        np.minimum(min_dist, point_distances(points, points[chosen]), out=min_dist)
        min_dist[chosen] = -1.0
    return selected


def farthest_point_sampling(point_set: PointSet2D, k: int, start_index: int = 0) -> PointSet2D:
    """Subset of `point_set` chosen by FPS, in selection order."""
    indices = fps_indices(point_set.points, k, start_index)
    return PointSet2D(points=point_set.points[indices], label=point_set.label)
