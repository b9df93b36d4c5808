"""
LangGraph state for the fit pipeline.
"""

from pathlib import Path
from typing import TypedDict

from config import RunConfig
from schemas.models import (
    BlendshapeModel,
    FitReport,
    LabelManifest,
    LandmarkSet,
    PartPointSets,
)


class FitState(TypedDict):
    config: RunConfig
    label_map_path: Path
    manifest_path: Path | None
    landmarks_path: Path | None
    model_path: Path
    output_dir: Path
    write_svg: bool
    model: BlendshapeModel | None
    manifest: LabelManifest | None
    raw_targets: PartPointSets | None
    targets: PartPointSets | None
    landmarks: LandmarkSet | None
    load_failed: bool
    nothing_to_fit: bool
    report: FitReport | None
    written: list[Path]
    exit_code: int
    errors: list[str]
