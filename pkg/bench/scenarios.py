"""
Synthetic benchmark scenarios.

`toy` fits a generated face to its own rasterization; `displaced_disc` puts a
disc target far outside the reach of distance-decaying losses; `decoy` shifts a
row of small discs so that the trailing discs meet a neighbour's target before
their own.
"""

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict

from bench.overlap import rasterize_points
from face_model.toy import gen_toy_model, rasterize_toy_targets, toy_camera, toy_landmarks
from ingest.masks import mask_to_points
from schemas.models import (
    BlendshapeModel,
    Camera,
    LandmarkSet,
    ParamGroup,
    PartLabel,
    PartMask,
    PartPointSets,
    PointSet2D,
    ScenarioKind,
    ScenarioSettings,
    ShapeParams,
    SoftSilhouetteConfig,
)

logger = logging.getLogger(__name__)

DISC_RESOLUTION = 96
DISC_RADIUS = 8
DECOY_RADIUS = 3
ROW_DISCS = 3
ROW_SPACING = 24
ROW_SHIFT = 32.0
DISC_PART = PartLabel.NOSE
TOY_LEARNING_RATE = 1e-2
DISC_LEARNING_RATE = 0.1
# discs only translate
FIXED_DISC_GROUPS: list[ParamGroup] = ["id", "exp", "pose"]


class Scenario(BaseModel):
    """One fitting problem: model, camera, targets and the starting point."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: ScenarioKind
    seed: int
    model: BlendshapeModel
    camera: Camera
    targets: PartPointSets
    landmarks: LandmarkSet
    init_params: ShapeParams
    fixed_groups: list[ParamGroup] = []
    learning_rate: float


def _disc_lattice(radius: int) -> np.ndarray:
    span = np.arange(-radius, radius + 1, dtype=np.float64)
    gx, gy = np.meshgrid(span, span)
    keep = gx**2 + gy**2 <= radius * radius
    return np.column_stack([gx[keep], gy[keep]])


def _splat_disc(centre: tuple[float, float], radius: int, splat_radius: float) -> np.ndarray:
    points = PointSet2D(points=_disc_lattice(radius) + np.asarray(centre))
    return rasterize_points(points, DISC_RESOLUTION, DISC_RESOLUTION, splat_radius).bits


def disc_model(radius: int = DISC_RADIUS) -> BlendshapeModel:
    """Flat disc of unit-spaced vertices with one radial-scale identity column."""
    xy = _disc_lattice(radius)
    n = len(xy)
    mean = np.column_stack([xy, np.zeros(n)])
    radial = np.column_stack([0.1 * xy, np.zeros(n)]).reshape(-1, 1)
    return BlendshapeModel(
        mean_shape=mean,
        identity_basis=radial,
        expression_basis=np.zeros((3 * n, 1)),
        part_annotation={DISC_PART: np.arange(n)},
    )


def _disc_targets(mask: np.ndarray) -> PartPointSets:
    size = mask.shape[0]
    points = mask_to_points(PartMask(bits=mask), DISC_PART)
    return PartPointSets(sets={DISC_PART: points}, height=size, width=size)


def _disc_init(model: BlendshapeModel, centre_x: float, centre_y: float) -> ShapeParams:
    half = DISC_RESOLUTION / 2.0
    # unit camera scale; model y points up
    return ShapeParams(
        alpha_id=np.zeros(model.k_id),
        alpha_exp=np.zeros(model.k_exp),
        alpha_t=np.array([centre_x - half, half - centre_y, 0.0]),
    )


def displaced_disc_scenario(
    seed: int,
    displacement_sigmas: float,
    silhouette: SoftSilhouetteConfig,
    splat_radius: float = 1.0,
) -> Scenario:
    """Target disc moved `displacement_sigmas`·σ away from the initial disc in a seeded direction."""
    rng = np.random.default_rng(seed)
    angle = rng.uniform(0.0, 2.0 * np.pi)
    half = DISC_RESOLUTION / 2.0
    shift = displacement_sigmas * silhouette.sigma
    centre = (float(np.rint(half + shift * np.cos(angle))), float(np.rint(half + shift * np.sin(angle))))
    model = disc_model()
    return Scenario(
        kind=ScenarioKind.DISPLACED_DISC,
        seed=seed,
        model=model,
        camera=Camera(scale=1.0, cx=half, cy=half),
        targets=_disc_targets(_splat_disc(centre, DISC_RADIUS, splat_radius)),
        landmarks=LandmarkSet(),
        init_params=_disc_init(model, half, half),
        fixed_groups=FIXED_DISC_GROUPS,
        learning_rate=DISC_LEARNING_RATE,
    )


def row_model(radius: int = DECOY_RADIUS, count: int = ROW_DISCS, spacing: int = ROW_SPACING) -> BlendshapeModel:
    """`count` small discs centred on a horizontal row, `spacing` px apart."""
    disc = _disc_lattice(radius)
    offsets = (np.arange(count) - (count - 1) / 2.0) * spacing
    xy = np.concatenate([disc + np.array([offset, 0.0]) for offset in offsets])
    n = len(xy)
    mean = np.column_stack([xy, np.zeros(n)])
    radial = np.column_stack([0.1 * xy, np.zeros(n)]).reshape(-1, 1)
    return BlendshapeModel(
        mean_shape=mean,
        identity_basis=radial,
        expression_basis=np.zeros((3 * n, 1)),
        part_annotation={DISC_PART: np.arange(n)},
    )


def decoy_scenario(seed: int, splat_radius: float = 1.0) -> Scenario:
    """
    A row of three small discs fitted to the same row moved `ROW_SHIFT` px right.

    The shift is a spacing and a third, so the middle and last initial discs
    each have a neighbour's target between them and their own. Nearest-point
    losses settle halfway, with those two discs 8 px past that neighbour.
    """
    rng = np.random.default_rng(seed)
    jitter = rng.integers(-2, 3, size=3).astype(np.float64)
    row = DISC_RESOLUTION / 2.0 + jitter[0]
    start_x = 30.0 + jitter[1]
    target_x = start_x + ROW_SHIFT + jitter[2]
    offsets = (np.arange(ROW_DISCS) - (ROW_DISCS - 1) / 2.0) * ROW_SPACING
    mask = np.zeros((DISC_RESOLUTION, DISC_RESOLUTION), dtype=bool)
    for offset in offsets:
        mask |= _splat_disc((target_x + offset, row), DECOY_RADIUS, splat_radius)
    model = row_model()
    half = DISC_RESOLUTION / 2.0
    return Scenario(
        kind=ScenarioKind.DECOY,
        seed=seed,
        model=model,
        camera=Camera(scale=1.0, cx=half, cy=half),
        targets=_disc_targets(mask),
        landmarks=LandmarkSet(),
        init_params=_disc_init(model, start_x, row),
        fixed_groups=FIXED_DISC_GROUPS,
        learning_rate=DISC_LEARNING_RATE,
    )


def toy_scenario(seed: int, settings: ScenarioSettings, splat_radius: float = 1.0) -> Scenario:
    """Toy face rasterized at its ground truth, fitted from the mean face."""
    model, truth = gen_toy_model(seed, settings.n_vertices, settings.k_id, settings.k_exp)
    camera = toy_camera(settings.resolution)
    targets = rasterize_toy_targets(
        model, camera, truth, settings.resolution, settings.resolution, splat_radius
    )
    return Scenario(
        kind=ScenarioKind.TOY,
        seed=seed,
        model=model,
        camera=camera,
        targets=targets,
        landmarks=toy_landmarks(model, camera, truth),
        init_params=ShapeParams.zeros(model.k_id, model.k_exp),
        learning_rate=TOY_LEARNING_RATE,
    )


def build_scenario(
    settings: ScenarioSettings,
    seed: int,
    silhouette: SoftSilhouetteConfig | None = None,
    splat_radius: float = 1.0,
) -> Scenario:
    silhouette = silhouette or SoftSilhouetteConfig()
    if settings.kind == ScenarioKind.TOY:
        scenario = toy_scenario(seed, settings, splat_radius)
    elif settings.kind == ScenarioKind.DISPLACED_DISC:
        scenario = displaced_disc_scenario(seed, settings.displacement_sigmas, silhouette, splat_radius)
    else:
        scenario = decoy_scenario(seed, splat_radius)
    logger.debug(f"Built {settings.kind.value} scenario for seed {seed}")
    return scenario
