"""
Input loading node: model, label map, manifest and landmarks.
"""

import logging

from errors import FormatError, PRDLError
from face_model.storage import load_model
from ingest.label_maps import load_label_map, load_manifest
from ingest.landmarks import load_landmarks
from schemas.models import LandmarkSet
from schemas.state import FitState

logger = logging.getLogger(__name__)


def load_targets(state: FitState) -> FitState:
    """
    Read every input file named in the state.

    Args:
        state: Graph state with model, label map and optional manifest/landmark paths

    Returns:
        Updated state with model, raw_targets and landmarks, or load_failed
    """
    try:
        model = load_model(state["model_path"])
        manifest = load_manifest(state["manifest_path"]) if state.get("manifest_path") else None
        raw_targets = load_label_map(state["label_map_path"], manifest)
        landmarks = load_landmarks(state["landmarks_path"]) if state.get("landmarks_path") else LandmarkSet()
        if len(landmarks) and int(landmarks.vertex_indices.max()) >= model.n_vertices:
            raise FormatError(
                f"{state['landmarks_path']}: vertex index {int(landmarks.vertex_indices.max())} "
                f"outside a {model.n_vertices}-vertex model"
            )
    except FileNotFoundError as e:
        logger.error(f"File not found: {e}")
        return {
            **state,
            "load_failed": True,
            "errors": state.get("errors", []) + [f"file not found: {e}"],
        }
    except (PRDLError, OSError) as e:
        logger.error(f"Target loading error: {e}")
        return {
            **state,
            "load_failed": True,
            "errors": state.get("errors", []) + [f"Target loading: {e}"],
        }

    logger.info(
        f"Loaded {model.n_vertices}-vertex model, {raw_targets.width}x{raw_targets.height} label map, "
        f"{len(landmarks)} landmarks"
    )
    return {
        **state,
        "model": model,
        "manifest": manifest,
        "raw_targets": raw_targets,
        "landmarks": landmarks,
        "load_failed": False,
    }
