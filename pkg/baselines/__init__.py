"""
Baseline geometric losses for comparison with PRDL.
"""

from .point_losses import chamfer_loss, nn_loss_directed
from .silhouette import soft_occupancy, soft_silhouette_iou_loss

__all__ = [
    "chamfer_loss",
    "nn_loss_directed",
    "soft_occupancy",
    "soft_silhouette_iou_loss",
]
