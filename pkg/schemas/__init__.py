"""
Data schemas for the PRDL toolkit.
"""

from .models import (
    DISTANCE_ORDER,
    EYEBROWS,
    PART_ORDER,
    AnchorGrid,
    AnchorSettings,
    BenchTable,
    BlendshapeModel,
    Camera,
    CameraMode,
    ConsistencyScope,
    DescriptorTensor,
    DistanceFunction,
    DistanceFunctionSet,
    FitConfig,
    FitReport,
    GradCheckResult,
    IoUReport,
    IterationRecord,
    LabelManifest,
    LandmarkSet,
    LossKind,
    LossWeights,
    MetricSettings,
    PartLabel,
    PartMask,
    PartPointSets,
    Point2D,
    PointSet2D,
    PreprocessSettings,
    ProjectionSettings,
    RunResult,
    ScenarioKind,
    ScenarioSettings,
    ShapeParams,
    SoftSilhouetteConfig,
    TerminationReason,
    VariantSummary,
    param_groups,
)

__all__ = [
    "DISTANCE_ORDER",
    "EYEBROWS",
    "PART_ORDER",
    "AnchorGrid",
    "AnchorSettings",
    "BenchTable",
    "BlendshapeModel",
    "Camera",
    "CameraMode",
    "ConsistencyScope",
    "DescriptorTensor",
    "DistanceFunction",
    "DistanceFunctionSet",
    "FitConfig",
    "FitReport",
    "GradCheckResult",
    "IoUReport",
    "IterationRecord",
    "LabelManifest",
    "LandmarkSet",
    "LossKind",
    "LossWeights",
    "MetricSettings",
    "PartLabel",
    "PartMask",
    "PartPointSets",
    "Point2D",
    "PointSet2D",
    "PreprocessSettings",
    "ProjectionSettings",
    "RunResult",
    "ScenarioKind",
    "ScenarioSettings",
    "ShapeParams",
    "SoftSilhouetteConfig",
    "TerminationReason",
    "VariantSummary",
    "param_groups",
]
