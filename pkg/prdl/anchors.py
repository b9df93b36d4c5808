"""
Anchor grids: the full pixel lattice, regular sub-lattices and FPS subsets.
"""

import logging

import numpy as np

from errors import InvalidArgumentError
from geometry.sampling import fps_indices
from schemas.models import AnchorGrid, AnchorSettings, PointSet2D

logger = logging.getLogger(__name__)


def lattice_anchors(height: int, width: int, stride: int = 1) -> AnchorGrid:
    """Integer lattice over the image in row-major order (x varies fastest)."""
    if height < 1 or width < 1 or stride < 1:
        raise InvalidArgumentError(f"invalid lattice {height}x{width} stride {stride}")
    ys = np.arange(0, height, stride, dtype=np.float64)
    xs = np.arange(0, width, stride, dtype=np.float64)
    gx, gy = np.meshgrid(xs, ys, indexing="xy")
    points = np.stack([gx.ravel(), gy.ravel()], axis=1)
    return AnchorGrid(
        anchors=PointSet2D(points=points),
        height=height,
        width=width,
        lattice_shape=(len(ys), len(xs)),
    )


def subsample_anchors(grid: AnchorGrid, k: int, start_index: int = 0) -> AnchorGrid:
    """
    Reduce the anchors to `k` by farthest point sampling.

    Args:
        grid: Source anchors
        k: Anchors kept, 1 <= k <= |A|; k = |A| returns the grid unchanged
        start_index: First anchor selected

    Returns:
        AnchorGrid in selection order, no longer a lattice
    """
    if not 1 <= k <= len(grid):
        raise InvalidArgumentError(f"k must lie in [1, {len(grid)}], got {k}")
    if k == len(grid):
        return grid
    indices = fps_indices(grid.points, k, start_index)
    return AnchorGrid(
        anchors=PointSet2D(points=grid.points[indices]),
        height=grid.height,
        width=grid.width,
        subsample=k,
    )


def build_anchor_grid(settings: AnchorSettings, height: int, width: int) -> AnchorGrid:
    grid = lattice_anchors(height, width, settings.stride)
    if settings.count is not None and settings.count < len(grid):
        grid = subsample_anchors(grid, settings.count, settings.start_index)
    logger.debug(f"Anchor grid: {len(grid)} anchors over {width}x{height}")
    return grid
