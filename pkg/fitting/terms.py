"""
Geometric loss terms behind one protocol so the fitting loop can swap them.

A term maps predicted points per part to a value and per-point gradients.
"""

import logging
from collections.abc import Mapping
from typing import Protocol

import numpy as np

from baselines.point_losses import chamfer_loss, nn_loss_directed
from baselines.silhouette import soft_silhouette_iou_loss
from ingest.masks import points_to_mask
from prdl.loss import PRDLTerm
from schemas.models import (
    PART_ORDER,
    AnchorGrid,
    DistanceFunctionSet,
    LossKind,
    PartLabel,
    PartMask,
    PartPointSets,
    SoftSilhouetteConfig,
)

logger = logging.getLogger(__name__)


class GeometricTerm(Protocol):
    kind: LossKind

    def evaluate(
        self, part_points: Mapping[PartLabel, np.ndarray]
    ) -> tuple[float, dict[PartLabel, np.ndarray]]: ...

    def diagnostics(self) -> dict[str, int]: ...


def _effective_weights(
    targets: PartPointSets, part_weights: Mapping[PartLabel, float]
) -> dict[PartLabel, float]:
    return {
        part: 0.0 if targets.get(part).is_empty else float(part_weights.get(part, 1.0))
        for part in PART_ORDER
    }


class PointLossTerm:
    """Chamfer or directed nearest-neighbour loss summed over parts with w_p."""

    def __init__(self, kind: LossKind, targets: PartPointSets, part_weights: Mapping[PartLabel, float]):
        if kind not in (LossKind.CHAMFER, LossKind.NN_PRED_TO_TARGET, LossKind.NN_TARGET_TO_PRED):
            raise ValueError(f"{kind.value} is not a point loss")
        self.kind = kind
        self.targets = targets
        self.weights = _effective_weights(targets, part_weights)
        self.empty_predictions = 0

    def _part(self, pred: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
        if self.kind == LossKind.CHAMFER:
            return chamfer_loss(pred, target)
        if self.kind == LossKind.NN_PRED_TO_TARGET:
            value, grad, _ = nn_loss_directed(pred, target)
            return value, grad
        value, _, grad = nn_loss_directed(target, pred)
        return value, grad

    def evaluate(
        self, part_points: Mapping[PartLabel, np.ndarray]
    ) -> tuple[float, dict[PartLabel, np.ndarray]]:
        total = 0.0
        grads: dict[PartLabel, np.ndarray] = {}
        for part, points in part_points.items():
            grads[part] = np.zeros((len(points), 2))
            weight = self.weights.get(part, 0.0)
            if weight == 0:
                continue
            if len(points) == 0:
                self.empty_predictions += 1
                continue
            value, grad = self._part(points, self.targets.get(part).points)
            total += weight * value
            grads[part] = weight * grad
        return total, grads

    def diagnostics(self) -> dict[str, int]:
        return {"empty_predictions": self.empty_predictions}


class SilhouetteTerm:
    """Soft silhouette IoU loss summed over parts with w_p."""

    kind = LossKind.SOFT_SILHOUETTE

    def __init__(
        self,
        targets: PartPointSets,
        part_weights: Mapping[PartLabel, float],
        config: SoftSilhouetteConfig | None = None,
    ):
        self.config = config or SoftSilhouetteConfig()
        self.weights = _effective_weights(targets, part_weights)
        self.masks: dict[PartLabel, PartMask] = {
            part: points_to_mask(targets.get(part), targets.height, targets.width)
            for part in PART_ORDER
            if self.weights[part] > 0
        }
        self.empty_predictions = 0

    def evaluate(
        self, part_points: Mapping[PartLabel, np.ndarray]
    ) -> tuple[float, dict[PartLabel, np.ndarray]]:
        total = 0.0
        grads: dict[PartLabel, np.ndarray] = {}
        for part, points in part_points.items():
            grads[part] = np.zeros((len(points), 2))
            weight = self.weights.get(part, 0.0)
            if weight == 0:
                continue
            if len(points) == 0:
                self.empty_predictions += 1
                total += weight
                continue
            value, grad = soft_silhouette_iou_loss(points, self.masks[part], self.config)
            total += weight * value
            grads[part] = weight * grad
        return total, grads

    def diagnostics(self) -> dict[str, int]:
        return {"empty_predictions": self.empty_predictions}


def build_geometric_term(
    kind: LossKind,
    targets: PartPointSets,
    part_weights: Mapping[PartLabel, float],
    anchors: AnchorGrid,
    functions: DistanceFunctionSet,
    skin_point_cap: int = 3000,
    singular_eps: float = 1e-6,
    silhouette: SoftSilhouetteConfig | None = None,
) -> GeometricTerm:
    """Instantiate the geometric term registered for `kind`."""
    logger.debug(f"Geometric term: {kind.value}")
    if kind == LossKind.PRDL:
        return PRDLTerm(targets, anchors, functions, part_weights, skin_point_cap, singular_eps)
    if kind == LossKind.SOFT_SILHOUETTE:
        return SilhouetteTerm(targets, part_weights, silhouette)
    return PointLossTerm(kind, targets, part_weights)
