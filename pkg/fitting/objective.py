"""
Total fitting loss λ_prdl·L_geo + λ_lmk·L_lmk + λ_reg·L_reg with its gradient on α.

Point-space gradients are chained to the parameters through the vector-Jacobian
product of the blendshape model and camera.
"""

import logging
from typing import NamedTuple

import numpy as np

from errors import InvalidArgumentError
from face_model.blendshape import assemble_vertices
from face_model.camera import project_array
from face_model.jacobian import vector_jacobian_product
from face_model.parts import TargetConsistency, select_part_vertices, visible_mask
from fitting.terms import GeometricTerm, build_geometric_term
from prdl.anchors import build_anchor_grid
from schemas.models import (
    PART_ORDER,
    AnchorGrid,
    AnchorSettings,
    BlendshapeModel,
    Camera,
    FitConfig,
    LandmarkSet,
    LossKind,
    LossWeights,
    PartLabel,
    PartPointSets,
    ProjectionSettings,
    ShapeParams,
    SoftSilhouetteConfig,
)

logger = logging.getLogger(__name__)


class Evaluation(NamedTuple):
    """Weighted loss components, their sum and ∂total/∂α."""

    total: float
    geometric: float
    landmark: float
    regularization: float
    grad: np.ndarray


def landmark_loss(
    pred_points: np.ndarray, landmarks: LandmarkSet, height: int, width: int
) -> tuple[float, np.ndarray]:
    """
    (1/(H·W)) Σ ‖projected(vertex) − (x, y)‖² and its gradient on every projected vertex.

    Args:
        pred_points: (n, 2) projections of all model vertices
        landmarks: Target positions bound to vertex indices
        height: Image rows
        width: Image columns

    Returns:
        (value, (n, 2) gradient); an empty landmark set gives (0, zeros)
    """
    grad = np.zeros_like(pred_points)
    if len(landmarks) == 0:
        return 0.0, grad
    indices = landmarks.vertex_indices
    if indices.max() >= len(pred_points):
        raise InvalidArgumentError(
            f"landmark vertex {int(indices.max())} is outside the {len(pred_points)} projected vertices"
        )
    diff = pred_points[indices] - landmarks.points
    scale = 1.0 / (height * width)
    np.add.at(grad, indices, 2.0 * scale * diff)
    return scale * float(np.einsum("ij,ij->", diff, diff)), grad


def regularization_loss(params: ShapeParams, weights: LossWeights) -> tuple[float, np.ndarray]:
    """‖α_id‖² + c_exp‖α_exp‖²; pose and translation are unregularized."""
    value = float(params.alpha_id @ params.alpha_id) + weights.exp_reg * float(
        params.alpha_exp @ params.alpha_exp
    )
    grad = np.concatenate(
        [2.0 * params.alpha_id, 2.0 * weights.exp_reg * params.alpha_exp, np.zeros(6)]
    )
    return value, grad


class Objective:
    """Total loss for one (model, camera, targets, landmarks) problem."""

    def __init__(
        self,
        model: BlendshapeModel,
        camera: Camera,
        targets: PartPointSets,
        landmarks: LandmarkSet,
        weights: LossWeights,
        term: GeometricTerm,
        projection: ProjectionSettings | None = None,
    ):
        if len(landmarks) and landmarks.vertex_indices.max() >= model.n_vertices:
            raise InvalidArgumentError("landmark file references vertices the model does not have")
        self.model = model
        self.camera = camera
        self.targets = targets
        self.landmarks = landmarks
        self.weights = weights
        self.term = term
        self.projection = projection or ProjectionSettings()
        self.consistency = TargetConsistency(targets, self.projection)
        self.parts = [p for p in PART_ORDER if p in model.part_annotation]

    def part_indices(
        self, vertices: np.ndarray, projected: np.ndarray
    ) -> dict[PartLabel, np.ndarray]:
        visible = visible_mask(vertices, self.projection.visibility_slack)
        return {
            part: select_part_vertices(
                self.model, part, vertices, projected, self.consistency, self.projection, visible
            )
            for part in self.parts
        }

    def evaluate(self, params: ShapeParams) -> Evaluation:
        weights = self.weights
        vertices = assemble_vertices(self.model, params)
        projected = project_array(self.camera, vertices)
        point_grads = np.zeros_like(projected)

        geometric = 0.0
        if weights.prdl > 0:
            indices = self.part_indices(vertices, projected)
            value, grads = self.term.evaluate({p: projected[idx] for p, idx in indices.items()})
            geometric = weights.prdl * value
            for part, idx in indices.items():
                point_grads[idx] += weights.prdl * grads[part]

        landmark = 0.0
        if weights.lmk > 0:
            value, grad = landmark_loss(projected, self.landmarks, self.targets.height, self.targets.width)
            landmark = weights.lmk * value
            point_grads += weights.lmk * grad

        reg_value, reg_grad = regularization_loss(params, weights)
        regularization = weights.reg * reg_value

        grad = vector_jacobian_product(self.model, self.camera, params, point_grads)
        grad += weights.reg * reg_grad
        return Evaluation(geometric + landmark + regularization, geometric, landmark, regularization, grad)


def build_objective(
    model: BlendshapeModel,
    camera: Camera,
    targets: PartPointSets,
    landmarks: LandmarkSet,
    weights: LossWeights,
    config: FitConfig | None = None,
    anchors: AnchorGrid | None = None,
    anchor_settings: AnchorSettings | None = None,
    projection: ProjectionSettings | None = None,
    silhouette: SoftSilhouetteConfig | None = None,
) -> Objective:
    config = config or FitConfig()
    anchor_settings = anchor_settings or AnchorSettings()
    if anchors is None:
        anchors = build_anchor_grid(anchor_settings, targets.height, targets.width)
    term = build_geometric_term(
        config.loss,
        targets,
        weights.part_weights,
        anchors,
        anchor_settings.function_set(),
        config.skin_point_cap,
        anchor_settings.singular_eps,
        silhouette,
    )
    return Objective(model, camera, targets, landmarks, weights, term, projection)


def total_loss(
    model: BlendshapeModel,
    camera: Camera,
    params: ShapeParams,
    targets: PartPointSets,
    landmarks: LandmarkSet,
    weights: LossWeights,
    *,
    loss: LossKind = LossKind.PRDL,
    anchors: AnchorGrid | None = None,
    anchor_settings: AnchorSettings | None = None,
    projection: ProjectionSettings | None = None,
) -> Evaluation:
    """One-shot evaluation of the total loss and its gradient at `params`."""
    objective = build_objective(
        model,
        camera,
        targets,
        landmarks,
        weights,
        FitConfig(loss=loss),
        anchors,
        anchor_settings,
        projection,
    )
    return objective.evaluate(params)
