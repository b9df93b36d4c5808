"""
Overlap metrics and the loss-comparison / distance-ablation harness.

The harness modules (`bench.scenarios`, `bench.experiments`, `bench.figures`,
`bench.tables`) are imported directly; this package only re-exports the metrics.
"""

from .overlap import fit_iou, iou_report, part_iou, predicted_masks, rasterize_points, target_masks

__all__ = [
    "fit_iou",
    "iou_report",
    "part_iou",
    "predicted_masks",
    "rasterize_points",
    "target_masks",
]
