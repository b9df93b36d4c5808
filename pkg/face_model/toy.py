"""
Deterministic toy face model for desk-scale experiments.

Every part is sampled from one shared lattice in model units (y up), so
vertices of different parts never sit closer than the lattice allows, and a
label map rasterized from the model can be annotated back exactly.
"""

import logging

import numpy as np

from errors import InvalidArgumentError
from face_model.blendshape import assemble_vertices
from face_model.camera import project_array
from geometry.raster import splat_disc_mask
from geometry.sampling import fps_indices
from geometry.spatial import SpatialIndex
from ingest.label_maps import part_masks
from ingest.masks import mask_to_points
from schemas.models import (
    PART_ORDER,
    BlendshapeModel,
    Camera,
    CameraMode,
    LabelManifest,
    LandmarkSet,
    PartLabel,
    PartPointSets,
    ShapeParams,
)

logger = logging.getLogger(__name__)

LATTICE_STEP = 0.046875
NON_SKIN_DENSITY = 1.5
SKIN_MARGIN = 0.07

# centre (x, y) and radii (rx, ry) of each elliptical part, model units
PART_LAYOUT: dict[PartLabel, tuple[tuple[float, float], tuple[float, float]]] = {
    PartLabel.LEFT_EYE: ((0.38, 0.22), (0.20, 0.10)),
    PartLabel.RIGHT_EYE: ((-0.38, 0.22), (0.20, 0.10)),
    PartLabel.LEFT_EYEBROW: ((0.38, 0.50), (0.26, 0.07)),
    PartLabel.RIGHT_EYEBROW: ((-0.38, 0.50), (0.26, 0.07)),
    PartLabel.UP_LIP: ((0.0, -0.48), (0.30, 0.07)),
    PartLabel.DOWN_LIP: ((0.0, -0.68), (0.28, 0.09)),
    PartLabel.NOSE: ((0.0, -0.05), (0.12, 0.26)),
}
SKIN_CENTRE = (0.0, -0.1)
SKIN_RADII = (0.95, 1.05)
SKIN_TOP = 0.57


def toy_camera(resolution: int = 128) -> Camera:
    """Orthographic camera framing the toy face in a square image."""
    return Camera(
        mode=CameraMode.ORTHOGRAPHIC,
        scale=resolution / 4.0,
        cx=resolution / 2.0,
        cy=resolution / 2.0,
    )


def _in_ellipse(points: np.ndarray, centre: tuple[float, float], radii: tuple[float, float]) -> np.ndarray:
    u = (points[:, 0] - centre[0]) / radii[0]
    v = (points[:, 1] - centre[1]) / radii[1]
    return u * u + v * v <= 1.0


def _candidate_regions(rng: np.random.Generator) -> dict[PartLabel, np.ndarray]:
    offset = rng.uniform(0.0, LATTICE_STEP, size=2)
    axis = np.arange(-1.3, 1.3, LATTICE_STEP)
    xs, ys = np.meshgrid(axis + offset[0], axis + offset[1], indexing="xy")
    lattice = np.stack([xs.ravel(), ys.ravel()], axis=1)

    regions = {part: lattice[_in_ellipse(lattice, c, r)] for part, (c, r) in PART_LAYOUT.items()}
    skin = _in_ellipse(lattice, SKIN_CENTRE, SKIN_RADII) & (lattice[:, 1] <= SKIN_TOP)
    for centre, (rx, ry) in PART_LAYOUT.values():
        skin &= ~_in_ellipse(lattice, centre, (rx + SKIN_MARGIN, ry + SKIN_MARGIN))
    regions[PartLabel.SKIN] = lattice[skin]
    return regions


def _allocate(regions: dict[PartLabel, np.ndarray], n_vertices: int) -> dict[PartLabel, int]:
    total = sum(len(points) for points in regions.values())
    if n_vertices > total:
        raise InvalidArgumentError(f"toy layout holds at most {total} vertices, asked for {n_vertices}")
    weight = {
        part: len(points) * (1.0 if part == PartLabel.SKIN else NON_SKIN_DENSITY)
        for part, points in regions.items()
    }
    weight_sum = sum(weight.values())
    counts = {
        part: min(int(n_vertices * weight[part] / weight_sum), len(regions[part]))
        for part in PART_ORDER
        if part != PartLabel.SKIN
    }
    counts[PartLabel.SKIN] = n_vertices - sum(counts.values())
    overflow = counts[PartLabel.SKIN] - len(regions[PartLabel.SKIN])
    for part in PART_ORDER:
        if overflow <= 0:
            break
        if part == PartLabel.SKIN:
            continue
        extra = min(overflow, len(regions[part]) - counts[part])
        counts[part] += extra
        counts[PartLabel.SKIN] -= extra
        overflow -= extra
    return counts


def _depth(xy: np.ndarray) -> np.ndarray:
    bulge = 0.25 * (1.0 - xy[:, 0] ** 2 - ((xy[:, 1] + 0.1) / 1.1) ** 2)
    nose = 0.18 * np.exp(-(xy[:, 0] ** 2 / 0.02 + (xy[:, 1] + 0.05) ** 2 / 0.06))
    return bulge + nose


def _bump(xy: np.ndarray, centre: tuple[float, float], sigma: float) -> np.ndarray:
    d2 = (xy[:, 0] - centre[0]) ** 2 + (xy[:, 1] - centre[1]) ** 2
    return np.exp(-d2 / (2.0 * sigma * sigma))


def _field(dx: np.ndarray | float, dy: np.ndarray | float, dz: np.ndarray | float, n: int) -> np.ndarray:
    field = np.zeros((n, 3))
    field[:, 0], field[:, 1], field[:, 2] = dx, dy, dz
    return field.ravel()


def _identity_fields(xy: np.ndarray) -> list[np.ndarray]:
    n = len(xy)
    (lx, ly), _ = PART_LAYOUT[PartLabel.LEFT_EYE]
    (bx, by), _ = PART_LAYOUT[PartLabel.LEFT_EYEBROW]
    (nx, ny), _ = PART_LAYOUT[PartLabel.NOSE]
    mouth = (0.0, -0.58)
    eyes = _bump(xy, (lx, ly), 0.2) - _bump(xy, (-lx, ly), 0.2)
    brows = _bump(xy, (bx, by), 0.2) + _bump(xy, (-bx, by), 0.2)
    return [
        _field(0.08 * xy[:, 0], 0.0, 0.0, n),  # face width
        _field(0.0, 0.08 * (xy[:, 1] - SKIN_CENTRE[1]), 0.0, n),  # face height
        _field(0.05 * eyes, 0.0, 0.0, n),  # eye spacing
        _field(0.0, 0.04 * brows, 0.0, n),  # brow height
        _field(0.0, -0.04 * _bump(xy, (nx, ny - 0.15), 0.2), 0.04 * _bump(xy, (nx, ny), 0.15), n),  # nose length
        _field(0.08 * xy[:, 0] * _bump(xy, mouth, 0.25), 0.0, 0.0, n),  # mouth width
    ]


def _expression_fields(xy: np.ndarray) -> list[np.ndarray]:
    n = len(xy)
    eye_l, eye_r = PART_LAYOUT[PartLabel.LEFT_EYE][0], PART_LAYOUT[PartLabel.RIGHT_EYE][0]
    up, down = PART_LAYOUT[PartLabel.UP_LIP][0], PART_LAYOUT[PartLabel.DOWN_LIP][0]
    brow_l, brow_r = PART_LAYOUT[PartLabel.LEFT_EYEBROW][0], PART_LAYOUT[PartLabel.RIGHT_EYEBROW][0]
    corners = _bump(xy, (0.3, -0.55), 0.12) + _bump(xy, (-0.3, -0.55), 0.12)
    inner_brows = _bump(xy, (0.15, 0.5), 0.12) + _bump(xy, (-0.15, 0.5), 0.12)
    closing = -0.5 * (
        (xy[:, 1] - eye_l[1]) * _bump(xy, eye_l, 0.15) + (xy[:, 1] - eye_r[1]) * _bump(xy, eye_r, 0.15)
    )
    return [
        _field(0.0, closing, 0.0, n),  # eye closing
        _field(0.0, 0.05 * _bump(xy, up, 0.15) - 0.07 * _bump(xy, down, 0.15), 0.0, n),  # mouth open
        _field(0.0, 0.05 * (_bump(xy, brow_l, 0.18) + _bump(xy, brow_r, 0.18)), 0.0, n),  # brow raise
        _field(0.05 * np.sign(xy[:, 0]) * corners, 0.03 * corners, 0.0, n),  # smile
        _field(-0.03 * np.sign(xy[:, 0]) * inner_brows, -0.02 * inner_brows, 0.0, n),  # frown
    ]


def _random_field(xy: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    n = len(xy)
    field = np.zeros((n, 3))
    for _ in range(3):
        centre = (rng.uniform(-0.7, 0.7), rng.uniform(-0.9, 0.5))
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        field += 0.03 * np.outer(_bump(xy, centre, rng.uniform(0.2, 0.4)), direction)
    return field.ravel()


def _basis(fixed: list[np.ndarray], k: int, xy: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    columns = fixed[:k]
    while len(columns) < k:
        columns.append(_random_field(xy, rng))
    return np.stack(columns, axis=1)


def _landmarks(mean_shape: np.ndarray, annotation: dict[PartLabel, np.ndarray]) -> np.ndarray:
    chosen: list[int] = []
    for part in PART_ORDER:
        indices = annotation.get(part)
        if part == PartLabel.SKIN or indices is None or len(indices) == 0:
            continue
        xy = mean_shape[indices, :2]
        for column, pick in ((0, np.argmin), (0, np.argmax), (1, np.argmax), (1, np.argmin)):
            vertex = int(indices[pick(xy[:, column])])
            if vertex not in chosen:
                chosen.append(vertex)
    return np.array(chosen, dtype=np.int64)


def gen_toy_model(
    seed: int, n_vertices: int = 600, k_id: int = 8, k_exp: int = 6
) -> tuple[BlendshapeModel, ShapeParams]:
    """
    Generate a face-like toy model and a ground-truth parameter vector.

    Args:
        seed: Random seed; equal seeds give bitwise-identical output
        n_vertices: Vertex count
        k_id: Identity basis size (semantic columns first, then smooth random fields)
        k_exp: Expression basis size (eye closing, mouth opening, brow raise, smile, frown, then random)

    Returns:
        (model, ground_truth_params)
    """
    if n_vertices < 1 or k_id < 1 or k_exp < 1:
        raise InvalidArgumentError(
            f"toy sizes must be >= 1, got n={n_vertices}, k_id={k_id}, k_exp={k_exp}"
        )
    rng = np.random.default_rng(seed)
    regions = _candidate_regions(rng)
    counts = _allocate(regions, n_vertices)

    chosen: list[np.ndarray] = []
    labels: list[np.ndarray] = []
    for part in PART_ORDER:
        if counts[part] == 0:
            continue
        candidates = regions[part]
        start = int(rng.integers(len(candidates)))
        chosen.append(candidates[fps_indices(candidates, counts[part], start)])
        labels.append(np.full(counts[part], part.code))
    xy = np.concatenate(chosen)
    codes = np.concatenate(labels)

    order = rng.permutation(n_vertices)
    xy, codes = xy[order], codes[order]
    mean_shape = np.column_stack([xy, _depth(xy)])
    annotation = {part: np.flatnonzero(codes == part.code) for part in PART_ORDER}

    identity = _basis(_identity_fields(xy), k_id, xy, rng)
    expression = _basis(_expression_fields(xy), k_exp, xy, rng)

    model = BlendshapeModel(
        mean_shape=mean_shape,
        identity_basis=identity,
        expression_basis=expression,
        part_annotation=annotation,
        landmark_indices=_landmarks(mean_shape, annotation),
    )
    translation = np.zeros(3)
    translation[:2] = rng.normal(0.0, 0.06, size=2)
    truth = ShapeParams(
        alpha_id=np.clip(rng.normal(0.0, 0.7, size=k_id), -1.5, 1.5),
        alpha_exp=np.clip(rng.normal(0.0, 0.6, size=k_exp), -1.5, 1.5),
        alpha_a=rng.normal(0.0, 0.05, size=3),
        alpha_t=translation,
    )
    logger.debug(f"Toy model seed={seed}: " + ", ".join(f"{p.value}={counts[p]}" for p in PART_ORDER))
    return model, truth


def rasterize_toy_labels(
    model: BlendshapeModel,
    camera: Camera,
    params: ShapeParams,
    height: int,
    width: int,
    radius: float = 1.0,
) -> np.ndarray:
    """
    Label map of the model at `params`.

    Pixels inside the union of vertex splats take the code of their nearest
    projected annotated vertex.
    """
    codes = np.zeros(model.n_vertices, dtype=np.uint8)
    for part, indices in model.part_annotation.items():
        codes[indices] = part.code
    annotated = np.flatnonzero(codes)
    if len(annotated) == 0:
        raise InvalidArgumentError("model has no annotated vertices")

    projected = project_array(camera, assemble_vertices(model, params))[annotated]
    covered = splat_disc_mask(projected, height, width, radius)
    rows, cols = np.nonzero(covered)
    label_map = np.zeros((height, width), dtype=np.uint8)
    if len(rows):
        _, nearest = SpatialIndex(projected).nearest_many(np.column_stack([cols, rows]))
        label_map[rows, cols] = codes[annotated[nearest]]
    return label_map


def rasterize_toy_targets(
    model: BlendshapeModel,
    camera: Camera,
    params: ShapeParams,
    height: int,
    width: int,
    radius: float = 1.0,
) -> PartPointSets:
    """Per-part target point sets of the model rendered at `params`."""
    label_map = rasterize_toy_labels(model, camera, params, height, width, radius)
    masks = part_masks(label_map, LabelManifest(width=width, height=height))
    return PartPointSets(
        sets={part: mask_to_points(mask, part) for part, mask in masks.items()},
        height=height,
        width=width,
    )


def toy_landmarks(model: BlendshapeModel, camera: Camera, params: ShapeParams) -> LandmarkSet:
    """Exact projections of the model's landmark vertices."""
    projected = project_array(camera, assemble_vertices(model, params))
    return LandmarkSet(
        vertex_indices=model.landmark_indices, points=projected[model.landmark_indices]
    )
