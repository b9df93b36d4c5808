"""
Nearest-neighbour point-set losses: directed NN and bidirectional chamfer.

Both use the mean squared nearest-neighbour distance per direction.
"""

import numpy as np

from errors import EmptySetError
from geometry.spatial import SpatialIndex
from schemas.models import PointSet2D


def _points(value: PointSet2D | np.ndarray) -> np.ndarray:
    if isinstance(value, PointSet2D):
        return value.points
    return np.asarray(value, dtype=np.float64).reshape(-1, 2)


def nn_loss_directed(
    source: PointSet2D | np.ndarray, target: PointSet2D | np.ndarray
) -> tuple[float, np.ndarray, np.ndarray]:
    """
    Mean over `source` of the squared distance to its nearest `target` point.

    Returns:
        (value, gradient on source, gradient on target) with correspondences held fixed
    """
    src, dst = _points(source), _points(target)
    if len(src) == 0 or len(dst) == 0:
        raise EmptySetError("nearest-neighbour loss needs two non-empty sets")
    _, nearest = SpatialIndex(dst).nearest_many(src)
    diff = src - dst[nearest]
    value = float(np.einsum("ij,ij->", diff, diff)) / len(src)
    grad_source = 2.0 * diff / len(src)
    grad_target = np.zeros_like(dst)
    np.add.at(grad_target, nearest, -grad_source)
    return value, grad_source, grad_target


def chamfer_loss(
    pred: PointSet2D | np.ndarray, target: PointSet2D | np.ndarray
) -> tuple[float, np.ndarray]:
    """Bidirectional chamfer loss and its gradient on `pred`."""
    forward, grad_forward, _ = nn_loss_directed(pred, target)
    backward, _, grad_backward = nn_loss_directed(target, pred)
    return forward + backward, grad_forward + grad_backward
