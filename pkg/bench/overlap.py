"""
Part IoU between rasterized predictions and ground-truth masks.
"""

from collections.abc import Mapping

import numpy as np

from errors import InvalidArgumentError
from face_model.blendshape import assemble_vertices
from face_model.camera import project_array
from face_model.parts import select_part_vertices
from geometry.raster import splat_disc_mask
from ingest.masks import points_to_mask
from schemas.models import (
    PART_ORDER,
    BlendshapeModel,
    Camera,
    IoUReport,
    PartLabel,
    PartMask,
    PartPointSets,
    PointSet2D,
    ProjectionSettings,
    ShapeParams,
)


def rasterize_points(point_set: PointSet2D, height: int, width: int, radius: float = 1.0) -> PartMask:
    """Disc splat of radius `radius` per point, one 3×3 closing, clipped to the image."""
    return PartMask(bits=splat_disc_mask(point_set.points, height, width, radius))


def part_iou(pred_mask: PartMask, gt_mask: PartMask) -> float:
    """|pred ∩ gt| / |pred ∪ gt|; two empty masks agree perfectly (1.0)."""
    if pred_mask.bits.shape != gt_mask.bits.shape:
        raise InvalidArgumentError(
            f"mask shapes differ: {pred_mask.bits.shape} vs {gt_mask.bits.shape}"
        )
    union = int(np.count_nonzero(pred_mask.bits | gt_mask.bits))
    if union == 0:
        return 1.0
    return int(np.count_nonzero(pred_mask.bits & gt_mask.bits)) / union


def iou_report(
    pred_masks: Mapping[PartLabel, PartMask], gt_masks: Mapping[PartLabel, PartMask]
) -> IoUReport:
    """
    Per-part IoU over every part of `gt_masks`.

    The mean runs over parts with a non-empty ground truth, or over all parts
    when every ground truth is empty.
    """
    per_part: dict[PartLabel, float] = {}
    height = width = 0
    for part in PART_ORDER:
        if part not in gt_masks:
            continue
        gt = gt_masks[part]
        height, width = gt.height, gt.width
        pred = pred_masks[part] if part in pred_masks else PartMask.empty(gt.height, gt.width)
        per_part[part] = part_iou(pred, gt)
    if not per_part:
        raise InvalidArgumentError("no ground-truth masks given")
    scored = [per_part[p] for p in per_part if gt_masks[p].area > 0] or list(per_part.values())
    return IoUReport(per_part=per_part, mean_iou=float(np.mean(scored)), height=height, width=width)


def target_masks(targets: PartPointSets) -> dict[PartLabel, PartMask]:
    return {
        part: points_to_mask(targets.get(part), targets.height, targets.width) for part in PART_ORDER
    }


def predicted_masks(
    model: BlendshapeModel,
    camera: Camera,
    params: ShapeParams,
    height: int,
    width: int,
    radius: float = 1.0,
    projection: ProjectionSettings | None = None,
) -> dict[PartLabel, PartMask]:
    """Rasterized visible vertices of every annotated part."""
    vertices = assemble_vertices(model, params)
    projected = project_array(camera, vertices)
    masks: dict[PartLabel, PartMask] = {}
    for part in PART_ORDER:
        if part not in model.part_annotation:
            continue
        indices = select_part_vertices(model, part, vertices, projected, None, projection)
        masks[part] = rasterize_points(PointSet2D(points=projected[indices]), height, width, radius)
    return masks


def fit_iou(
    model: BlendshapeModel,
    camera: Camera,
    params: ShapeParams,
    targets: PartPointSets,
    radius: float = 1.0,
    projection: ProjectionSettings | None = None,
) -> IoUReport:
    """IoU of the model at `params` against the target point sets."""
    pred = predicted_masks(model, camera, params, targets.height, targets.width, radius, projection)
    return iou_report(pred, target_masks(targets))
