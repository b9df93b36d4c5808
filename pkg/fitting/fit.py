"""
Per-image parameter fitting with Adam.
"""

import logging
import math
import time

import numpy as np

from bench.overlap import fit_iou
from errors import NothingToFitError, PRDLError, ProjectionError
from fitting.objective import build_objective
from fitting.optimizer import Adam
from schemas.models import (
    AnchorGrid,
    AnchorSettings,
    BlendshapeModel,
    Camera,
    FitConfig,
    FitReport,
    IoUReport,
    IterationRecord,
    LandmarkSet,
    LossWeights,
    PartPointSets,
    ProjectionSettings,
    ShapeParams,
    SoftSilhouetteConfig,
    TerminationReason,
    param_groups,
)

logger = logging.getLogger(__name__)


def _relative_change(previous: float | None, current: float) -> float:
    if previous is None:
        return 0.0 if current == 0.0 else math.inf
    return abs(previous - current) / max(abs(previous), 1e-300)


def fit(
    model: BlendshapeModel,
    camera: Camera,
    targets: PartPointSets,
    landmarks: LandmarkSet,
    config: FitConfig,
    weights: LossWeights,
    init_params: ShapeParams | None = None,
    *,
    anchors: AnchorGrid | None = None,
    anchor_settings: AnchorSettings | None = None,
    projection: ProjectionSettings | None = None,
    silhouette: SoftSilhouetteConfig | None = None,
    splat_radius: float = 1.0,
) -> FitReport:
    """
    Fit shape parameters to one target image.

    Runs Adam on α for at most `max_iters` steps, stopping early once
    `patience` consecutive steps each change the total loss by less than
    `tolerance` relative. A start whose loss is exactly zero counts as
    stalled. `iterations` in the report is the number of steps taken. A
    non-finite loss or gradient aborts the run; the report then carries the
    last finite parameters.

    Args:
        model: Annotated blendshape model
        camera: Fixed projection
        targets: Target point sets C_p
        landmarks: 2D landmarks (may be empty)
        config: Optimizer, convergence and loss selection
        weights: λ weights and per-part weights
        init_params: Starting point (all zeros by default)
        anchors: Prebuilt anchor grid (built from `anchor_settings` otherwise)
        anchor_settings: Lattice, subsampling and distance functions
        projection: Visibility and target-consistency settings
        silhouette: Soft silhouette σ when fitting with that baseline
        splat_radius: Rasterization radius for the final IoU

    Returns:
        FitReport with the loss history, final parameters and part IoU
    """
    if not targets.non_empty_parts() and len(landmarks) == 0:
        raise NothingToFitError("every target part is empty and no landmarks were given")

    started = time.perf_counter()
    objective = build_objective(
        model, camera, targets, landmarks, weights, config, anchors, anchor_settings, projection, silhouette
    )
    params = init_params or ShapeParams.zeros(model.k_id, model.k_exp)
    x = params.to_vector()
    mask = np.ones_like(x)
    for group in config.fixed_groups:
        mask[param_groups(model.k_id, model.k_exp)[group]] = 0.0

    optimizer = Adam(config.learning_rate, config.beta1, config.beta2, config.epsilon)
    history: list[IterationRecord] = []
    termination = TerminationReason.MAX_ITERS
    diagnostics: dict[str, int] = {}
    previous: float | None = None
    stalled = 0
    iterations = 0
    last_record: IterationRecord | None = None
    last_finite = x

    for iteration in range(config.max_iters):
        evaluation = None
        if np.all(np.isfinite(x)):
            try:
                evaluation = objective.evaluate(ShapeParams.from_vector(x, model.k_id, model.k_exp))
            except (FloatingPointError, ProjectionError) as e:
                logger.warning(f"Iteration {iteration}: {e}")
        if evaluation is None or not (math.isfinite(evaluation.total) and np.all(np.isfinite(evaluation.grad))):
            logger.warning(f"Non-finite loss at iteration {iteration}; aborting")
            termination = TerminationReason.NAN_ABORT
            diagnostics["nan_iteration"] = iteration
            x = last_finite
            break

        iterations = iteration
        last_finite = x
        record = IterationRecord(
            iteration=iteration,
            prdl=evaluation.geometric,
            lmk=evaluation.landmark,
            reg=evaluation.regularization,
            total=evaluation.total,
        )
        last_record = record
        if iteration % config.record_every == 0:
            history.append(record)
        logger.debug(f"iter {iteration}: total={evaluation.total:.6e}")

        stalled = stalled + 1 if _relative_change(previous, evaluation.total) < config.tolerance else 0
        previous = evaluation.total
        if stalled >= config.patience:
            termination = TerminationReason.CONVERGED
            break
        x = optimizer.step(x, evaluation.grad * mask)
        iterations = iteration + 1

    if last_record is not None and (not history or history[-1].iteration != last_record.iteration):
        history.append(last_record)

    if not np.all(np.isfinite(x)):
        x = last_finite
    final = ShapeParams.from_vector(x, model.k_id, model.k_exp)
    try:
        iou = fit_iou(model, camera, final, targets, splat_radius, projection)
    except PRDLError as e:
        logger.warning(f"Final IoU unavailable: {e}")
        iou = IoUReport(per_part={}, mean_iou=0.0, height=targets.height, width=targets.width)
    diagnostics.update(objective.term.diagnostics())

    report = FitReport(
        seed=config.seed,
        loss=config.loss,
        weights=weights,
        iterations=iterations,
        termination=termination,
        history=history,
        final_params=final,
        iou=iou,
        diagnostics=diagnostics,
        wall_time_s=time.perf_counter() - started,
    )
    logger.info(
        f"Fit finished: {termination.value} after {iterations} iterations, "
        f"loss={report.final_loss:.6e}, mean IoU={iou.mean_iou:.4f}"
    )
    return report
