"""
Per-part projected point sets V_2d^p with visibility and target-consistency filters.
"""

import logging

import numpy as np
from scipy.spatial import cKDTree

from errors import InvalidArgumentError
from face_model.blendshape import assemble_vertices
from face_model.camera import project_array
from schemas.models import (
    EYEBROWS,
    BlendshapeModel,
    Camera,
    ConsistencyScope,
    PartLabel,
    PartPointSets,
    PointSet2D,
    ProjectionSettings,
    ShapeParams,
)

logger = logging.getLogger(__name__)


def visible_mask(vertices: np.ndarray, slack: float) -> np.ndarray:
    """
    Vertices whose posed z exceeds the median z of the whole mesh minus `slack`.

    Part selection and annotation transfer both use this rule.
    """
    depth = vertices[:, 2]
    return depth > np.median(depth) - slack


class TargetConsistency:
    """
    Filters that tie predicted part points to the target image.

    Points above the target's eyebrow line are dropped, and so are points
    whose nearest target pixel (any part) lies beyond the occlusion radius.
    With `ConsistencyScope.SKIN` only skin points are filtered, and the
    occlusion test only looks inside the target bounding box.
    """

    def __init__(self, targets: PartPointSets, settings: ProjectionSettings | None = None):
        settings = settings or ProjectionSettings()
        self.occlusion_radius = settings.occlusion_radius
        self.scope = settings.consistency_parts

        brows = [targets.get(p).points for p in EYEBROWS if not targets.get(p).is_empty]
        self.eyebrow_cut: float | None = None
        if settings.forehead_cut and brows:
            self.eyebrow_cut = min(float(points[:, 1].min()) for points in brows)

        union = targets.union_points()
        self._tree: cKDTree | None = None
        self._bbox: tuple[float, float, float, float] | None = None
        if len(union):
            self._tree = cKDTree(union)
            lo, hi = union.min(axis=0), union.max(axis=0)
            self._bbox = (float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))

    def _in_bbox(self, points: np.ndarray) -> np.ndarray:
        if self.scope == ConsistencyScope.ALL or self._bbox is None:
            return np.ones(len(points), dtype=bool)
        x0, y0, x1, y1 = self._bbox
        return (points[:, 0] >= x0) & (points[:, 0] <= x1) & (points[:, 1] >= y0) & (points[:, 1] <= y1)

    def keep_mask(self, part: PartLabel, points: np.ndarray) -> np.ndarray:
        keep = np.ones(len(points), dtype=bool)
        if len(points) == 0 or (self.scope == ConsistencyScope.SKIN and part != PartLabel.SKIN):
            return keep
        if self.eyebrow_cut is not None:
            keep &= points[:, 1] >= self.eyebrow_cut
        if self.occlusion_radius is not None and self._tree is not None:
            candidates = np.flatnonzero(self._in_bbox(points) & keep)
            if len(candidates):
                dist, _ = self._tree.query(points[candidates])
                keep[candidates[dist > self.occlusion_radius]] = False
        return keep


def _as_part(part: PartLabel | str) -> PartLabel:
    try:
        return PartLabel(part)
    except ValueError as e:
        raise InvalidArgumentError(f"unknown part {part!r}") from e


def select_part_vertices(
    model: BlendshapeModel,
    part: PartLabel | str,
    vertices: np.ndarray,
    projected: np.ndarray,
    consistency: TargetConsistency | None = None,
    settings: ProjectionSettings | None = None,
    visible: np.ndarray | None = None,
) -> np.ndarray:
    """
    Indices of the part's vertices that survive visibility and consistency filtering.

    Args:
        model: Annotated model
        part: Part to select
        vertices: Posed vertices of the whole mesh
        projected: Their 2D projections
        consistency: Target-consistency filters (none when omitted)
        settings: Visibility slack
        visible: Precomputed `visible_mask` of `vertices`, shared across parts
    """
    part = _as_part(part)
    if part not in model.part_annotation:
        raise InvalidArgumentError(f"model has no annotation for {part.value}")
    settings = settings or ProjectionSettings()
    indices = model.part_annotation[part]
    if len(indices) == 0:
        return indices
    if visible is None:
        visible = visible_mask(vertices, settings.visibility_slack)
    selected = indices[visible[indices]]
    if consistency is not None:
        selected = selected[consistency.keep_mask(part, projected[selected])]
    dropped = len(indices) - len(selected)
    if dropped:
        logger.debug(f"{part.value}: {dropped} of {len(indices)} vertices filtered")
    return selected


def part_points(
    model: BlendshapeModel,
    camera: Camera,
    params: ShapeParams,
    part: PartLabel | str,
    consistency: TargetConsistency | None = None,
    settings: ProjectionSettings | None = None,
) -> PointSet2D:
    """Projected, filtered points of one annotated part."""
    vertices = assemble_vertices(model, params)
    projected = project_array(camera, vertices)
    selected = select_part_vertices(model, part, vertices, projected, consistency, settings)
    return PointSet2D(points=projected[selected], label=_as_part(part))
