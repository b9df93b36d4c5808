"""
Transfer of 2D part segmentations onto model vertices.

Every target pixel votes for its k nearest visible projected vertices; each
vertex joins the part with most votes, ties going to the lowest part code.
"""

import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from errors import AnnotationError, FormatError, InvalidArgumentError
from face_model.blendshape import assemble_vertices
from face_model.camera import project_array
from face_model.parts import visible_mask
from geometry.spatial import SpatialIndex
from schemas.models import (
    PART_ORDER,
    BlendshapeModel,
    Camera,
    PartLabel,
    PartPointSets,
    ProjectionSettings,
    ShapeParams,
)

logger = logging.getLogger(__name__)


def annotate_parts_multi(
    model: BlendshapeModel,
    camera: Camera,
    views: Sequence[tuple[ShapeParams, PartPointSets]],
    k: int = 1,
    settings: ProjectionSettings | None = None,
) -> dict[PartLabel, np.ndarray]:
    """
    Accumulate part votes over several (params, target sets) views.

    Args:
        model: Model to annotate (its existing annotation is ignored)
        camera: Projection used to render the targets
        views: Pairs of shape parameters and the segmentation observed at them
        k: Nearest visible vertices credited per target pixel
        settings: Visibility slack

    Returns:
        Sorted, disjoint vertex indices per part
    """
    if k < 1:
        raise InvalidArgumentError(f"k must be >= 1, got {k}")
    settings = settings or ProjectionSettings()
    votes = np.zeros((model.n_vertices, len(PART_ORDER)), dtype=np.int64)
    any_target = False

    for params, targets in views:
        vertices = assemble_vertices(model, params)
        projected = project_array(camera, vertices)
        visible = np.flatnonzero(visible_mask(vertices, settings.visibility_slack))
        neighbours = min(k, len(visible))
        index = SpatialIndex(projected[visible])
        tree = cKDTree(projected[visible]) if neighbours > 1 else None

        for column, part in enumerate(PART_ORDER):
            pixels = targets.get(part).points
            if len(pixels) == 0:
                continue
            any_target = True
            if tree is None:
                _, nearest = index.nearest_many(pixels)
            else:
                _, nearest = tree.query(pixels, k=neighbours)
            hits = visible[np.asarray(nearest).ravel()]
            votes[:, column] += np.bincount(hits, minlength=model.n_vertices)

    if not any_target:
        raise AnnotationError("every target part is empty")

    assigned = votes.sum(axis=1) > 0
    winner = np.argmax(votes, axis=1)
    annotation = {
        part: np.flatnonzero(assigned & (winner == column)) for column, part in enumerate(PART_ORDER)
    }
    logger.info(
        "Annotated " + ", ".join(f"{p.value}={len(idx)}" for p, idx in annotation.items())
    )
    return annotation


def annotate_parts(
    model: BlendshapeModel,
    camera: Camera,
    neutral_params: ShapeParams,
    target_sets: PartPointSets,
    k: int = 1,
    settings: ProjectionSettings | None = None,
) -> dict[PartLabel, np.ndarray]:
    """Single-view annotation transfer."""
    return annotate_parts_multi(model, camera, [(neutral_params, target_sets)], k, settings)


def write_annotation(
    annotation: dict[PartLabel, np.ndarray], path: Path | str, seed: int | None = None
) -> Path:
    """Write `part_code: idx idx ...` lines in part-code order, after a `# seed=` line when given."""
    path = Path(path)
    lines = [] if seed is None else [f"# seed={seed}"]
    for part in PART_ORDER:
        if part in annotation:
            indices = " ".join(str(i) for i in np.asarray(annotation[part]).tolist())
            lines.append(f"{part.code}: {indices}".rstrip())
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_annotation(path: Path | str) -> dict[PartLabel, np.ndarray]:
    path = Path(path)
    annotation: dict[PartLabel, np.ndarray] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        code, sep, rest = raw.partition(":")
        try:
            if not sep:
                raise ValueError("missing ':'")
            part = PartLabel.from_code(int(code))
            indices = np.array([int(tok) for tok in rest.split()], dtype=np.int64)
        except ValueError as e:
            raise FormatError(f"{path}:{lineno}: {e}") from e
        annotation[part] = indices
    return annotation
