"""
Target cleanup node.
"""

import logging

from ingest.masks import preprocess_targets
from schemas.state import FitState

logger = logging.getLogger(__name__)


def preprocess(state: FitState) -> FitState:
    """Drop isolated specks and the forehead band; flag runs with nothing left to fit."""
    raw = state["raw_targets"]
    targets = preprocess_targets(raw, state["config"].preprocess)
    for part in raw.non_empty_parts():
        if targets.get(part).is_empty:
            logger.warning(f"{part.value}: every target pixel removed by preprocessing")

    landmarks = state.get("landmarks")
    if not targets.non_empty_parts() and (landmarks is None or len(landmarks) == 0):
        logger.error("Every target part is empty and no landmarks were given")
        return {
            **state,
            "targets": targets,
            "nothing_to_fit": True,
            "errors": state.get("errors", []) + ["nothing to fit: every target part is empty"],
        }

    logger.info(f"Fitting {len(targets.non_empty_parts())} non-empty parts")
    return {**state, "targets": targets, "nothing_to_fit": False}
