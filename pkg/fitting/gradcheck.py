"""
Finite-difference checks of every analytic gradient in the toolkit.

Each check draws random tie-free instances, compares the analytic gradient
with central differences (step 1e-5) and reports the worst norm-wise
relative error.
"""

import logging
from collections.abc import Callable

import numpy as np
from scipy.spatial.distance import cdist

from baselines.point_losses import chamfer_loss, nn_loss_directed
from baselines.silhouette import soft_silhouette_iou_loss
from face_model.blendshape import assemble_vertices
from face_model.camera import project_array
from face_model.jacobian import parameter_jacobian, vector_jacobian_product
from errors import PRDLError
from fitting.objective import landmark_loss, regularization_loss, total_loss
from prdl.descriptor import descriptor_values
from prdl.loss import part_value_and_gradient
from schemas.models import (
    AnchorGrid,
    AnchorSettings,
    BlendshapeModel,
    Camera,
    CameraMode,
    DistanceFunction,
    DistanceFunctionSet,
    GradCheckResult,
    LandmarkSet,
    LossWeights,
    PartLabel,
    PartMask,
    PartPointSets,
    PointSet2D,
    ProjectionSettings,
    ShapeParams,
)

logger = logging.getLogger(__name__)

FD_STEP = 1e-5
TOLERANCE = 1e-5
# px between the two nearest (and two farthest) points seen from any anchor
TIE_MARGIN = 1e-2
MAX_REDRAWS = 50


def central_difference(
    func: Callable[[np.ndarray], float | np.ndarray], x: np.ndarray, step: float = FD_STEP
) -> np.ndarray:
    """∂func/∂x by central differences; vector-valued functions give a Jacobian (out × in)."""
    x = np.asarray(x, dtype=np.float64)
    flat = x.ravel()
    columns = []
    for i in range(flat.size):
        plus, minus = flat.copy(), flat.copy()
        plus[i] += step
        minus[i] -= step
        diff = (np.asarray(func(plus.reshape(x.shape))) - np.asarray(func(minus.reshape(x.shape)))) / (2 * step)
        columns.append(np.ravel(diff))
    jac = np.stack(columns, axis=-1)
    return jac.reshape(x.shape) if jac.shape[0] == 1 else jac


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """‖a − n‖ / max(‖a‖, ‖n‖); both near zero counts as agreement."""
    a, n = np.ravel(analytic), np.ravel(numeric)
    scale = max(np.linalg.norm(a), np.linalg.norm(n))
    if scale < 1e-10:
        return 0.0
    return float(np.linalg.norm(a - n) / scale)


def _points(rng: np.random.Generator, count: int, extent: float = 16.0) -> np.ndarray:
    return rng.uniform(0.0, extent, size=(count, 2))


def tie_margin(points: np.ndarray, anchors: np.ndarray) -> float:
    """Smallest gap between the best and runner-up distance for min and for max over all anchors."""
    if len(points) < 2 or len(anchors) == 0:
        return np.inf
    dist = np.sort(cdist(anchors, points), axis=1)
    return float(min(np.min(dist[:, 1] - dist[:, 0]), np.min(dist[:, -1] - dist[:, -2])))


def _tie_free_points(rng: np.random.Generator, count: int, anchors: np.ndarray) -> np.ndarray:
    for _ in range(MAX_REDRAWS):
        points = _points(rng, count)
        if tie_margin(points, anchors) >= TIE_MARGIN:
            return points
    raise PRDLError(f"no tie-free draw of {count} points in {MAX_REDRAWS} tries")


def _random_model(rng: np.random.Generator, n: int = 12, k_id: int = 3, k_exp: int = 2) -> BlendshapeModel:
    mean = np.column_stack([rng.uniform(-1, 1, size=(n, 2)), rng.uniform(-0.1, 0.1, size=n)])
    half = n // 2
    return BlendshapeModel(
        mean_shape=mean,
        identity_basis=0.1 * rng.normal(size=(3 * n, k_id)),
        expression_basis=0.1 * rng.normal(size=(3 * n, k_exp)),
        part_annotation={
            PartLabel.LEFT_EYE: np.arange(half),
            PartLabel.NOSE: np.arange(half, n),
        },
        landmark_indices=np.array([0, n - 1]),
    )


def _random_params(rng: np.random.Generator, model: BlendshapeModel) -> ShapeParams:
    return ShapeParams(
        alpha_id=rng.normal(0, 0.5, model.k_id),
        alpha_exp=rng.normal(0, 0.5, model.k_exp),
        alpha_a=rng.normal(0, 0.2, 3),
        alpha_t=np.array([*rng.normal(0, 0.1, 2), 0.0]),
    )


class _Check:
    def __init__(self, name: str, tolerance: float = TOLERANCE):
        self.name = name
        self.tolerance = tolerance
        self.errors: list[float] = []

    def add(self, analytic: np.ndarray, numeric: np.ndarray) -> None:
        self.errors.append(relative_error(analytic, numeric))

    def result(self) -> GradCheckResult:
        worst = max(self.errors) if self.errors else 0.0
        return GradCheckResult(
            name=self.name,
            instances=len(self.errors),
            max_rel_error=worst,
            tolerance=self.tolerance,
            passed=worst <= self.tolerance,
        )


def _check_prdl(rng, instances, functions: DistanceFunctionSet, flip: float) -> GradCheckResult:
    check = _Check(f"prdl_{functions.name}")
    for _ in range(instances):
        anchors = _points(rng, 12)
        target = descriptor_values(_points(rng, 10), anchors, functions)
        pred = _tie_free_points(rng, 8, anchors)

        def value(points: np.ndarray) -> float:
            return part_value_and_gradient(points, target, anchors, functions)[0]

        _, grad, _ = part_value_and_gradient(pred, target, anchors, functions)
        check.add(flip * grad, central_difference(value, pred))
    return check.result()


def _check_point_losses(rng, instances) -> list[GradCheckResult]:
    checks = {name: _Check(name) for name in ("chamfer", "nn_pred_to_target", "nn_target_to_pred")}
    for _ in range(instances):
        pred, target = _points(rng, 7), _points(rng, 9)
        checks["chamfer"].add(chamfer_loss(pred, target)[1], central_difference(lambda p: chamfer_loss(p, target)[0], pred))
        checks["nn_pred_to_target"].add(
            nn_loss_directed(pred, target)[1],
            central_difference(lambda p: nn_loss_directed(p, target)[0], pred),
        )
        checks["nn_target_to_pred"].add(
            nn_loss_directed(target, pred)[2],
            central_difference(lambda p: nn_loss_directed(target, p)[0], pred),
        )
    return [c.result() for c in checks.values()]


def _check_silhouette(rng, instances) -> GradCheckResult:
    check = _Check("soft_silhouette")
    for _ in range(instances):
        bits = np.zeros((12, 12), dtype=bool)
        x0, y0 = rng.integers(2, 6, size=2)
        bits[y0 : y0 + 4, x0 : x0 + 5] = True
        mask = PartMask(bits=bits)
        pred = rng.uniform(2.0, 10.0, size=(5, 2))
        _, grad = soft_silhouette_iou_loss(pred, mask)
        check.add(grad, central_difference(lambda p: soft_silhouette_iou_loss(p, mask)[0], pred))
    return check.result()


def _check_landmark_and_reg(rng, instances) -> list[GradCheckResult]:
    landmark, reg = _Check("landmark"), _Check("regularization")
    weights = LossWeights(exp_reg=0.5)
    for _ in range(instances):
        pred = _points(rng, 6)
        marks = LandmarkSet(vertex_indices=np.array([0, 2, 5]), points=_points(rng, 3))
        landmark.add(
            landmark_loss(pred, marks, 16, 16)[1],
            central_difference(lambda p: landmark_loss(p, marks, 16, 16)[0], pred),
        )
        vector = rng.normal(size=3 + 2 + 6)

        def reg_value(v: np.ndarray) -> float:
            return regularization_loss(ShapeParams.from_vector(v, 3, 2), weights)[0]

        reg.add(regularization_loss(ShapeParams.from_vector(vector, 3, 2), weights)[1], central_difference(reg_value, vector))
    return [landmark.result(), reg.result()]


def _check_model(rng, instances) -> list[GradCheckResult]:
    cameras = {
        "jacobian_orthographic": Camera(mode=CameraMode.ORTHOGRAPHIC, scale=8.0, cx=8.0, cy=8.0),
        "jacobian_weak_perspective": Camera(
            mode=CameraMode.WEAK_PERSPECTIVE, focal=80.0, depth_offset=10.0, cx=8.0, cy=8.0
        ),
    }
    checks = {name: _Check(name) for name in cameras}
    vjp = _Check("vector_jacobian_product")
    for _ in range(instances):
        model = _random_model(rng)
        params = _random_params(rng, model)
        for name, camera in cameras.items():

            def projected(v: np.ndarray, camera: Camera = camera) -> np.ndarray:
                p = ShapeParams.from_vector(v, model.k_id, model.k_exp)
                return project_array(camera, assemble_vertices(model, p)).ravel()

            checks[name].add(parameter_jacobian(model, camera, params), central_difference(projected, params.to_vector()))
        camera = cameras["jacobian_weak_perspective"]
        upstream = rng.normal(size=(model.n_vertices, 2))
        vjp.add(
            vector_jacobian_product(model, camera, params, upstream),
            parameter_jacobian(model, camera, params).T @ upstream.ravel(),
        )
    return [*(c.result() for c in checks.values()), vjp.result()]


def _tie_free_params(
    rng: np.random.Generator, model: BlendshapeModel, camera: Camera, anchors: np.ndarray
) -> ShapeParams:
    for _ in range(MAX_REDRAWS):
        params = _random_params(rng, model)
        projected = project_array(camera, assemble_vertices(model, params))
        if all(tie_margin(projected[idx], anchors) >= TIE_MARGIN for idx in model.part_annotation.values()):
            return params
    raise PRDLError(f"no tie-free parameter draw in {MAX_REDRAWS} tries")


def _check_total(rng, instances) -> GradCheckResult:
    check = _Check("total_loss")
    camera = Camera(scale=6.0, cx=8.0, cy=8.0)
    projection = ProjectionSettings(visibility_slack=100.0, occlusion_radius=None, forehead_cut=False)
    weights = LossWeights(prdl=1.0, lmk=0.5, reg=0.1, exp_reg=0.5)
    grid = AnchorGrid(anchors=PointSet2D(points=_points(rng, 16)), height=16, width=16)
    anchor_settings = AnchorSettings()
    for _ in range(instances):
        model = _random_model(rng)
        params = _tie_free_params(rng, model, camera, grid.anchors.points)
        targets = PartPointSets(
            sets={
                PartLabel.LEFT_EYE: PointSet2D(points=rng.uniform(2, 14, size=(6, 2))),
                PartLabel.NOSE: PointSet2D(points=rng.uniform(2, 14, size=(5, 2))),
            },
            height=16,
            width=16,
        )
        marks = LandmarkSet(vertex_indices=model.landmark_indices, points=rng.uniform(2, 14, size=(2, 2)))

        def value(v: np.ndarray) -> float:
            p = ShapeParams.from_vector(v, model.k_id, model.k_exp)
            return total_loss(
                model, camera, p, targets, marks, weights,
                anchors=grid, anchor_settings=anchor_settings, projection=projection,
            ).total

        analytic = total_loss(
            model, camera, params, targets, marks, weights,
            anchors=grid, anchor_settings=anchor_settings, projection=projection,
        ).grad
        check.add(analytic, central_difference(value, params.to_vector()))
    return check.result()


def run_grad_checks(seed: int = 0, instances: int = 100, inject_sign_flip: bool = False) -> list[GradCheckResult]:
    """
    Run the whole finite-difference suite.

    Args:
        seed: Seed for the random instances
        instances: Random instances per check
        inject_sign_flip: Negate the analytic PRDL gradients (harness self-test)

    Returns:
        One result per checked operation
    """
    rng = np.random.default_rng(seed)
    flip = -1.0 if inject_sign_flip else 1.0
    variants = [DistanceFunctionSet(functions=(f,)) for f in DistanceFunction] + [DistanceFunctionSet()]
    results = [_check_prdl(rng, instances, functions, flip) for functions in variants]
    results += _check_point_losses(rng, instances)
    results.append(_check_silhouette(rng, instances))
    results += _check_landmark_and_reg(rng, instances)
    results += _check_model(rng, instances)
    results.append(_check_total(rng, instances))
    for result in results:
        level = logging.INFO if result.passed else logging.ERROR
        logger.log(level, f"{result.name}: max rel error {result.max_rel_error:.3e} ({result.instances} instances)")
    return results
