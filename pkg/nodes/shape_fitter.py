"""
Shape fitting node.
"""

import logging

from errors import PRDLError
from fitting.fit import fit
from schemas.state import FitState

logger = logging.getLogger(__name__)


def fit_shape(state: FitState) -> FitState:
    """
    Run the optimizer on the preprocessed targets.

    Args:
        state: Graph state with model, targets, landmarks and config

    Returns:
        Updated state with the FitReport
    """
    config = state["config"]
    fit_config = config.fit.model_copy(update={"seed": config.seed})
    try:
        report = fit(
            state["model"],
            config.camera,
            state["targets"],
            state["landmarks"],
            fit_config,
            config.weights,
            anchor_settings=config.anchors,
            projection=config.projection,
            silhouette=config.silhouette,
            splat_radius=config.metrics.splat_radius,
        )
    except PRDLError as e:
        logger.error(f"Fitting error: {e}")
        return {
            **state,
            "report": None,
            "errors": state.get("errors", []) + [f"Fitting: {e}"],
        }
    return {**state, "report": report}
