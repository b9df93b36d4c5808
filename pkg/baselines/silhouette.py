"""
Soft silhouette IoU loss over Gaussian point splats.

Occupancy o(q) = 1 − Π_v (1 − exp(−‖q − v‖²/σ²)) on every pixel q; the loss
is 1 − Σ o·t / Σ (o + t − o·t) against the binary target t.
"""

import numpy as np
from scipy.spatial.distance import cdist

from errors import EmptySetError
from schemas.models import PartMask, PointSet2D, SoftSilhouetteConfig

BLOCK_ELEMENTS = 2_000_000
_G_MAX = 1.0 - 1e-12


def _pixel_grid(height: int, width: int) -> np.ndarray:
    gx, gy = np.meshgrid(np.arange(width, dtype=np.float64), np.arange(height, dtype=np.float64))
    return np.stack([gx.ravel(), gy.ravel()], axis=1)


def soft_occupancy(points: np.ndarray, height: int, width: int, sigma: float) -> tuple[np.ndarray, np.ndarray]:
    """Flattened occupancy o and survival product Π(1 − g) per pixel, row-major."""
    pixels = _pixel_grid(height, width)
    log_survival = np.empty(len(pixels))
    block = max(1, BLOCK_ELEMENTS // len(points))
    for start in range(0, len(pixels), block):
        d2 = cdist(pixels[start : start + block], points, "sqeuclidean")
        g = np.minimum(np.exp(-d2 / (sigma * sigma)), _G_MAX)
        log_survival[start : start + block] = np.log1p(-g).sum(axis=1)
    survival = np.exp(log_survival)
    return 1.0 - survival, survival


def soft_silhouette_iou_loss(
    pred: PointSet2D | np.ndarray,
    target_mask: PartMask,
    cfg: SoftSilhouetteConfig | None = None,
) -> tuple[float, np.ndarray]:
    """
    1 − softIoU(o, target) and its gradient on the predicted points.

    Args:
        pred: Non-empty predicted points
        target_mask: Binary target; an empty target gives loss 1 and zero gradient
        cfg: Splat width σ in pixels

    Returns:
        (value, (N, 2) gradient)
    """
    cfg = cfg or SoftSilhouetteConfig()
    points = pred.points if isinstance(pred, PointSet2D) else np.asarray(pred, dtype=np.float64).reshape(-1, 2)
    if len(points) == 0:
        raise EmptySetError("soft silhouette needs at least one predicted point")
    grad = np.zeros_like(points)
    if target_mask.area == 0:
        return 1.0, grad

    sigma2 = cfg.sigma * cfg.sigma
    height, width = target_mask.height, target_mask.width
    occupancy, survival = soft_occupancy(points, height, width, cfg.sigma)
    target = target_mask.bits.ravel().astype(np.float64)
    intersection = float(occupancy @ target)
    union = float(np.sum(occupancy + target - occupancy * target))
    value = 1.0 - intersection / union

    # dL/do per pixel
    upstream = -(target * union - intersection * (1.0 - target)) / (union * union)
    weight = upstream * survival
    pixels = _pixel_grid(height, width)
    block = max(1, BLOCK_ELEMENTS // len(points))
    for start in range(0, len(pixels), block):
        chunk = pixels[start : start + block]
        d2 = cdist(chunk, points, "sqeuclidean")
        g = np.minimum(np.exp(-d2 / (sigma2)), _G_MAX)
        # ∂o/∂v = Π(1 − g) · g/(1 − g) · 2(q − v)/σ²
        coef = weight[start : start + block, None] * (g / (1.0 - g)) * (2.0 / sigma2)
        grad += coef.T @ chunk - points * coef.sum(axis=0)[:, None]
    return value, grad
