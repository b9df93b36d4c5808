"""
Part Re-projection Distance Loss and its analytic gradient.

For each part p with weight w_p the loss is w_p/(H·W) · ‖Γ_p − Γ*_p‖²_F on the
full pixel lattice. `PRDLTerm` lets every anchor stand for H·W/|A| pixels, so
its scale is 1/|A| and does not change when the grid is thinned.

The nearest/furthest selections are held fixed within one evaluation, so
the gradient of an f_min or f_max entry flows only to the selected point,
along the line joining it to the anchor.
"""

import logging
from collections.abc import Mapping

import numpy as np
from scipy.spatial.distance import cdist

from errors import InvalidArgumentError
from geometry.sampling import fps_indices
from prdl.descriptor import anchor_blocks, descriptor_values
from schemas.models import (
    PART_ORDER,
    AnchorGrid,
    DescriptorTensor,
    DistanceFunction,
    DistanceFunctionSet,
    LossKind,
    PartLabel,
    PartPointSets,
    PointSet2D,
)

logger = logging.getLogger(__name__)

SINGULAR_EPS = 1e-6


def _values(descriptor: DescriptorTensor | np.ndarray) -> np.ndarray:
    if isinstance(descriptor, DescriptorTensor):
        return descriptor.values
    return np.asarray(descriptor, dtype=np.float64)


def part_value_and_gradient(
    points: np.ndarray,
    target_values: np.ndarray,
    anchors: np.ndarray,
    functions: DistanceFunctionSet,
    singular_eps: float = SINGULAR_EPS,
) -> tuple[float, np.ndarray, int]:
    """
    ‖Γ(points) − Γ*‖²_F, its gradient with respect to `points`, and the clamped pair count.

    Distances below `singular_eps` have their 1/d factor clamped to 1/eps.
    """
    n = len(points)
    if target_values.shape != (len(anchors), len(functions)):
        raise InvalidArgumentError(
            f"target descriptor is {target_values.shape}, expected {(len(anchors), len(functions))}"
        )
    grad = np.zeros((n, 2))
    value = 0.0
    clamped = 0

    for rows in anchor_blocks(len(anchors), n):
        block = anchors[rows]
        dist = cdist(block, points)
        target = target_values[rows]
        for column, function in enumerate(functions.functions):
            if function == DistanceFunction.AVE:
                mean = np.clip(dist.mean(axis=1), dist.min(axis=1), dist.max(axis=1))
                residual = mean - target[:, column]
                value += float(residual @ residual)
                clamped += int(np.count_nonzero(dist < singular_eps))
                coef = (2.0 * residual / n)[:, None] / np.maximum(dist, singular_eps)
                grad += points * coef.sum(axis=0)[:, None] - coef.T @ block
                continue

            if function == DistanceFunction.MIN:
                selected = np.argmin(dist, axis=1)
            else:
                selected = np.argmax(dist, axis=1)
            chosen = dist[np.arange(len(block)), selected]
            residual = chosen - target[:, column]
            value += float(residual @ residual)
            clamped += int(np.count_nonzero(chosen < singular_eps))
            coef = 2.0 * residual / np.maximum(chosen, singular_eps)
            delta = points[selected] - block
            grad[:, 0] += np.bincount(selected, weights=coef * delta[:, 0], minlength=n)
            grad[:, 1] += np.bincount(selected, weights=coef * delta[:, 1], minlength=n)

    return value, grad, clamped


def prdl_loss(
    pred_descriptors: Mapping[PartLabel, DescriptorTensor | np.ndarray],
    target_descriptors: Mapping[PartLabel, DescriptorTensor | np.ndarray],
    part_weights: Mapping[PartLabel, float],
    height: int,
    width: int,
) -> float:
    """
    (1/(H·W)) · Σ_p w_p ‖Γ_p − Γ*_p‖²_F; parts with zero weight are skipped.

    Args:
        pred_descriptors: Γ_p of the predicted point sets
        target_descriptors: Γ*_p of the targets
        part_weights: w_p, nonnegative
        height: Image rows H
        width: Image columns W

    Returns:
        Scalar loss
    """
    total = 0.0
    for part, weight in part_weights.items():
        if weight < 0:
            raise InvalidArgumentError(f"{part.value} weight is negative")
        if weight == 0:
            continue
        pred = _values(pred_descriptors[part])
        target = _values(target_descriptors[part])
        if pred.shape != target.shape:
            raise InvalidArgumentError(
                f"{part.value}: descriptor shapes differ {pred.shape} vs {target.shape}"
            )
        diff = pred - target
        total += weight * float(np.sum(diff * diff))
    return total / (height * width)


def prdl_gradient(
    pred_sets: Mapping[PartLabel, PointSet2D],
    target_descriptors: Mapping[PartLabel, DescriptorTensor | np.ndarray],
    anchors: AnchorGrid,
    functions: DistanceFunctionSet,
    part_weights: Mapping[PartLabel, float],
    height: int,
    width: int,
    singular_eps: float = SINGULAR_EPS,
) -> dict[PartLabel, np.ndarray]:
    """Per-point gradient of `prdl_loss` for each predicted part set."""
    grads: dict[PartLabel, np.ndarray] = {}
    scale = 1.0 / (height * width)
    for part, pred in pred_sets.items():
        weight = part_weights.get(part, 0.0)
        if weight == 0 or pred.is_empty:
            grads[part] = np.zeros((len(pred), 2))
            continue
        _, grad, clamped = part_value_and_gradient(
            pred.points, _values(target_descriptors[part]), anchors.points, functions, singular_eps
        )
        if clamped:
            logger.warning(f"{part.value}: clamped {clamped} anchor-coincident distances")
        grads[part] = weight * scale * grad
    return grads


class PRDLTerm:
    """
    PRDL over every part of one target image, with target descriptors computed once.

    Parts whose target is empty get weight zero. Skin sets larger than
    `skin_point_cap` are reduced by farthest point sampling on both sides
    before descriptors are taken. Values are averaged over anchors, which on
    the full lattice is the 1/(H·W) normalization.
    """

    kind = LossKind.PRDL

    def __init__(
        self,
        targets: PartPointSets,
        anchors: AnchorGrid,
        functions: DistanceFunctionSet | None = None,
        part_weights: Mapping[PartLabel, float] | None = None,
        skin_point_cap: int = 3000,
        singular_eps: float = SINGULAR_EPS,
    ):
        self.anchors = anchors
        self.functions = functions or DistanceFunctionSet()
        self.height = targets.height
        self.width = targets.width
        self.skin_point_cap = skin_point_cap
        self.singular_eps = singular_eps
        self.clamped_pairs = 0
        self.empty_predictions = 0

        part_weights = part_weights or {}
        self.weights: dict[PartLabel, float] = {}
        self.target_values: dict[PartLabel, np.ndarray] = {}
        for part in PART_ORDER:
            target = targets.get(part)
            weight = float(part_weights.get(part, 1.0))
            if target.is_empty:
                if weight > 0:
                    logger.warning(f"Target {part.value} is empty; its PRDL weight is set to 0")
                weight = 0.0
            self.weights[part] = weight
            if weight > 0:
                points = target.points[self._capped(part, target.points)]
                self.target_values[part] = descriptor_values(points, anchors.points, self.functions)

    def _capped(self, part: PartLabel, points: np.ndarray) -> np.ndarray:
        if part == PartLabel.SKIN and len(points) > self.skin_point_cap:
            return fps_indices(points, self.skin_point_cap, 0)
        return np.arange(len(points))

    def evaluate(
        self, part_points: Mapping[PartLabel, np.ndarray]
    ) -> tuple[float, dict[PartLabel, np.ndarray]]:
        """
        Loss value and per-point gradients for the predicted part points.

        Args:
            part_points: (N_p, 2) arrays of predicted points per part

        Returns:
            (value, gradients shaped like `part_points`)
        """
        scale = 1.0 / len(self.anchors)
        total = 0.0
        grads: dict[PartLabel, np.ndarray] = {}
        for part, points in part_points.items():
            grads[part] = np.zeros((len(points), 2))
            weight = self.weights.get(part, 0.0)
            if weight == 0:
                continue
            if len(points) == 0:
                self.empty_predictions += 1
                logger.debug(f"{part.value}: no predicted points survive filtering")
                continue
            keep = self._capped(part, points)
            value, grad, clamped = part_value_and_gradient(
                points[keep], self.target_values[part], self.anchors.points, self.functions, self.singular_eps
            )
            if clamped:
                self.clamped_pairs += clamped
                logger.debug(f"{part.value}: clamped {clamped} anchor-coincident distances")
            total += weight * scale * value
            grads[part][keep] = weight * scale * grad
        return total, grads

    def diagnostics(self) -> dict[str, int]:
        return {"clamped_pairs": self.clamped_pairs, "empty_predictions": self.empty_predictions}
