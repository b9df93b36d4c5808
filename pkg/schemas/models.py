"""
Data models for the PRDL toolkit.

All pydantic models and enums shared across packages. Numeric payloads are
numpy arrays carried through annotated array types that validate on the way
in and serialize to plain lists on the way out.
"""

from enum import Enum
from typing import Annotated, Any, Literal

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PlainSerializer,
    PlainValidator,
    field_validator,
    model_validator,
)


# === Array Types ===


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def _float_array(value: Any) -> np.ndarray:
    array = np.array(value, dtype=np.float64)
    if not np.all(np.isfinite(array)):
        raise ValueError("array contains non-finite values")
    return _frozen(array)


def _index_array(value: Any) -> np.ndarray:
    array = np.array(value, dtype=np.int64).reshape(-1)
    if np.any(array < 0):
        raise ValueError("indices must be non-negative")
    return _frozen(array)


def _bool_array(value: Any) -> np.ndarray:
    raw = np.asarray(value)
    if raw.dtype != np.bool_ and not np.isin(raw, (0, 1)).all():
        raise ValueError("mask entries must be 0 or 1")
    return _frozen(raw.astype(bool))


def _to_list(array: np.ndarray) -> list:
    return array.tolist()


FloatArray = Annotated[
    np.ndarray, PlainValidator(_float_array), PlainSerializer(_to_list, return_type=list)
]
IndexArray = Annotated[
    np.ndarray, PlainValidator(_index_array), PlainSerializer(_to_list, return_type=list)
]
BoolArray = Annotated[
    np.ndarray, PlainValidator(_bool_array), PlainSerializer(_to_list, return_type=list)
]

Point2D = tuple[float, float]


def empty_points() -> np.ndarray:
    return _frozen(np.zeros((0, 2), dtype=np.float64))


# === Enums ===


class PartLabel(str, Enum):
    LEFT_EYE = "left_eye"
    RIGHT_EYE = "right_eye"
    LEFT_EYEBROW = "left_eyebrow"
    RIGHT_EYEBROW = "right_eyebrow"
    UP_LIP = "up_lip"
    DOWN_LIP = "down_lip"
    NOSE = "nose"
    SKIN = "skin"

    @property
    def code(self) -> int:
        """Label-map pixel value (1..8; 0 is background)."""
        return PART_ORDER.index(self) + 1

    @classmethod
    def from_code(cls, code: int) -> "PartLabel":
        if not 1 <= code <= len(PART_ORDER):
            raise ValueError(f"unknown part code {code}")
        return PART_ORDER[code - 1]


PART_ORDER: tuple[PartLabel, ...] = tuple(PartLabel)
EYEBROWS = (PartLabel.LEFT_EYEBROW, PartLabel.RIGHT_EYEBROW)


class DistanceFunction(str, Enum):
    MIN = "min"
    MAX = "max"
    AVE = "ave"


DISTANCE_ORDER: tuple[DistanceFunction, ...] = tuple(DistanceFunction)


class CameraMode(str, Enum):
    ORTHOGRAPHIC = "orthographic"
    WEAK_PERSPECTIVE = "weak_perspective"


class LossKind(str, Enum):
    PRDL = "prdl"
    CHAMFER = "chamfer"
    NN_PRED_TO_TARGET = "nn_pred_to_target"
    NN_TARGET_TO_PRED = "nn_target_to_pred"
    SOFT_SILHOUETTE = "soft_silhouette"


class TerminationReason(str, Enum):
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"
    NAN_ABORT = "nan_abort"


class ScenarioKind(str, Enum):
    TOY = "toy"
    DISPLACED_DISC = "displaced_disc"
    DECOY = "decoy"


class ConsistencyScope(str, Enum):
    """Parts the target-consistency filters act on."""

    ALL = "all"
    SKIN = "skin"


ParamGroup = Literal["id", "exp", "pose", "trans"]
WeightsPreset = Literal["standard", "prdl-only"]


# === Point Sets & Masks ===


class PointSet2D(BaseModel):
    """Ordered 2D pixel points (x = column, y = row, y grows downward)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    points: FloatArray = Field(default_factory=empty_points)
    label: PartLabel | None = None

    @field_validator("points")
    @classmethod
    def check_shape(cls, v: np.ndarray) -> np.ndarray:
        if v.size == 0:
            return empty_points()
        if v.ndim != 2 or v.shape[1] != 2:
            raise ValueError(f"points must have shape (N, 2), got {v.shape}")
        return v

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @property
    def is_empty(self) -> bool:
        return len(self) == 0


class PartMask(BaseModel):
    """Binary H×W occupancy of one part."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    bits: BoolArray

    @field_validator("bits")
    @classmethod
    def check_dims(cls, v: np.ndarray) -> np.ndarray:
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError(f"mask must be a non-empty 2D array, got {v.shape}")
        return v

    @property
    def height(self) -> int:
        return int(self.bits.shape[0])

    @property
    def width(self) -> int:
        return int(self.bits.shape[1])

    @property
    def area(self) -> int:
        return int(self.bits.sum())

    @classmethod
    def empty(cls, height: int, width: int) -> "PartMask":
        return cls(bits=np.zeros((height, width), dtype=bool))


class PartPointSets(BaseModel):
    """Target point sets C_p for every part of one image."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    sets: dict[PartLabel, PointSet2D] = Field(default_factory=dict)
    height: int = Field(gt=0)
    width: int = Field(gt=0)

    @model_validator(mode="after")
    def fill_and_check(self) -> "PartPointSets":
        for part in PART_ORDER:
            if part not in self.sets:
                self.sets[part] = PointSet2D(label=part)
        for part, point_set in self.sets.items():
            if point_set.is_empty:
                continue
            xs, ys = point_set.points[:, 0], point_set.points[:, 1]
            if xs.min() < 0 or ys.min() < 0 or xs.max() >= self.width or ys.max() >= self.height:
                raise ValueError(f"{part.value} points fall outside the {self.width}x{self.height} image")
        return self

    def get(self, part: PartLabel) -> PointSet2D:
        return self.sets[part]

    def replace(self, part: PartLabel, point_set: PointSet2D) -> "PartPointSets":
        return PartPointSets(
            sets={**self.sets, part: point_set}, height=self.height, width=self.width
        )

    def non_empty_parts(self) -> list[PartLabel]:
        return [p for p in PART_ORDER if not self.sets[p].is_empty]

    def union_points(self) -> np.ndarray:
        arrays = [self.sets[p].points for p in PART_ORDER if not self.sets[p].is_empty]
        return np.concatenate(arrays) if arrays else empty_points()


class LandmarkSet(BaseModel):
    """2D landmark positions bound to model vertex indices."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    vertex_indices: IndexArray = Field(default_factory=lambda: _index_array([]))
    points: FloatArray = Field(default_factory=empty_points)

    @model_validator(mode="after")
    def check_lengths(self) -> "LandmarkSet":
        points = self.points if self.points.size else empty_points()
        if points.ndim != 2 or points.shape[1] != 2:
            raise ValueError("landmark points must have shape (N, 2)")
        if points.shape[0] != self.vertex_indices.shape[0]:
            raise ValueError("landmark points and vertex indices differ in length")
        object.__setattr__(self, "points", points)
        return self

    def __len__(self) -> int:
        return int(self.vertex_indices.shape[0])


class LabelManifest(BaseModel):
    """Sidecar description of a label-map file."""

    width: int = Field(gt=0)
    height: int = Field(gt=0)
    codes: dict[int, PartLabel] = Field(
        default_factory=lambda: {part.code: part for part in PART_ORDER}
    )

    @field_validator("codes")
    @classmethod
    def check_codes(cls, v: dict[int, PartLabel]) -> dict[int, PartLabel]:
        for code in v:
            if not 1 <= code <= 255:
                raise ValueError(f"code {code} is outside 1..255")
        return v


# === Face Model ===


class Camera(BaseModel):
    """Fixed camera projecting model units to pixels."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mode: CameraMode = CameraMode.ORTHOGRAPHIC
    scale: float = Field(default=32.0, gt=0)
    cx: float = 64.0
    cy: float = 64.0
    focal: float = Field(default=320.0, gt=0)
    depth_offset: float = 10.0


class BlendshapeModel(BaseModel):
    """
    Linear shape model.

    Arrays are vertex-major: `mean_shape` is n×3 and basis rows are ordered
    (x0, y0, z0, x1, ...), so `identity_basis` is 3n×k_id.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    mean_shape: FloatArray
    identity_basis: FloatArray
    expression_basis: FloatArray
    part_annotation: dict[PartLabel, IndexArray] = Field(default_factory=dict)
    landmark_indices: IndexArray = Field(default_factory=lambda: _index_array([]))

    @model_validator(mode="after")
    def check_dimensions(self) -> "BlendshapeModel":
        mean = self.mean_shape
        if mean.ndim != 2 or mean.shape[1] != 3 or mean.shape[0] < 1:
            raise ValueError(f"mean_shape must be n×3 with n >= 1, got {mean.shape}")
        rows = 3 * mean.shape[0]
        for name in ("identity_basis", "expression_basis"):
            basis = getattr(self, name)
            if basis.ndim != 2 or basis.shape[0] != rows:
                raise ValueError(f"{name} must have {rows} rows, got {basis.shape}")
        seen: set[int] = set()
        for part, indices in self.part_annotation.items():
            if indices.size and indices.max() >= mean.shape[0]:
                raise ValueError(f"{part.value} annotation references a missing vertex")
            if np.any(np.diff(indices) <= 0):
                raise ValueError(f"{part.value} annotation must be sorted and unique")
            overlap = seen.intersection(indices.tolist())
            if overlap:
                raise ValueError(f"{part.value} annotation overlaps another part at {sorted(overlap)[:5]}")
            seen.update(indices.tolist())
        if self.landmark_indices.size and self.landmark_indices.max() >= mean.shape[0]:
            raise ValueError("landmark index references a missing vertex")
        return self

    @property
    def n_vertices(self) -> int:
        return int(self.mean_shape.shape[0])

    @property
    def k_id(self) -> int:
        return int(self.identity_basis.shape[1])

    @property
    def k_exp(self) -> int:
        return int(self.expression_basis.shape[1])

    @property
    def n_params(self) -> int:
        return self.k_id + self.k_exp + 6

    def with_annotation(self, annotation: dict[PartLabel, np.ndarray]) -> "BlendshapeModel":
        return BlendshapeModel(
            mean_shape=self.mean_shape,
            identity_basis=self.identity_basis,
            expression_basis=self.expression_basis,
            part_annotation=annotation,
            landmark_indices=self.landmark_indices,
        )


class ShapeParams(BaseModel):
    """Parameter vector α = (α_id, α_exp, α_a, α_t); angles are (pitch, yaw, roll) radians."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    alpha_id: FloatArray
    alpha_exp: FloatArray
    alpha_a: FloatArray = Field(default_factory=lambda: _float_array(np.zeros(3)))
    alpha_t: FloatArray = Field(default_factory=lambda: _float_array(np.zeros(3)))

    @model_validator(mode="after")
    def check_shapes(self) -> "ShapeParams":
        for name in ("alpha_id", "alpha_exp"):
            if getattr(self, name).ndim != 1:
                raise ValueError(f"{name} must be a vector")
        for name in ("alpha_a", "alpha_t"):
            if getattr(self, name).shape != (3,):
                raise ValueError(f"{name} must have 3 entries")
        return self

    @classmethod
    def zeros(cls, k_id: int, k_exp: int) -> "ShapeParams":
        return cls(alpha_id=np.zeros(k_id), alpha_exp=np.zeros(k_exp))

    @classmethod
    def from_vector(cls, vector: np.ndarray, k_id: int, k_exp: int) -> "ShapeParams":
        vector = np.asarray(vector, dtype=np.float64)
        if vector.shape != (k_id + k_exp + 6,):
            raise ValueError(f"expected {k_id + k_exp + 6} parameters, got {vector.shape}")
        return cls(
            alpha_id=vector[:k_id],
            alpha_exp=vector[k_id : k_id + k_exp],
            alpha_a=vector[k_id + k_exp : k_id + k_exp + 3],
            alpha_t=vector[k_id + k_exp + 3 :],
        )

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.alpha_id, self.alpha_exp, self.alpha_a, self.alpha_t])


def param_groups(k_id: int, k_exp: int) -> dict[str, slice]:
    """Slices of the parameter vector per named group."""
    return {
        "id": slice(0, k_id),
        "exp": slice(k_id, k_id + k_exp),
        "pose": slice(k_id + k_exp, k_id + k_exp + 3),
        "trans": slice(k_id + k_exp + 3, k_id + k_exp + 6),
    }


# === Descriptors ===


class DistanceFunctionSet(BaseModel):
    """Ordered subset of {min, max, ave}; stored in canonical (min, max, ave) order."""

    model_config = ConfigDict(frozen=True)

    functions: tuple[DistanceFunction, ...] = DISTANCE_ORDER

    @field_validator("functions")
    @classmethod
    def canonical(cls, v: tuple[DistanceFunction, ...]) -> tuple[DistanceFunction, ...]:
        if not v:
            raise ValueError("at least one distance function is required")
        if len(set(v)) != len(v):
            raise ValueError("duplicate distance functions")
        return tuple(f for f in DISTANCE_ORDER if f in v)

    @classmethod
    def parse(cls, text: str) -> "DistanceFunctionSet":
        names = [name.strip() for name in text.replace("+", ",").split(",") if name.strip()]
        return cls(functions=tuple(DistanceFunction(name) for name in names))

    def __len__(self) -> int:
        return len(self.functions)

    def index(self, function: DistanceFunction) -> int:
        return self.functions.index(function)

    @property
    def name(self) -> str:
        return "+".join(f.value for f in self.functions)


class AnchorGrid(BaseModel):
    """Fixed anchors A; `lattice_shape` is set while the anchors still form a regular lattice."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    anchors: PointSet2D
    height: int = Field(gt=0)
    width: int = Field(gt=0)
    lattice_shape: tuple[int, int] | None = None
    subsample: int | None = None

    @model_validator(mode="after")
    def check_non_empty(self) -> "AnchorGrid":
        if self.anchors.is_empty:
            raise ValueError("anchor grid must not be empty")
        if self.lattice_shape and self.lattice_shape[0] * self.lattice_shape[1] != len(self.anchors):
            raise ValueError("lattice shape does not match the anchor count")
        return self

    @property
    def points(self) -> np.ndarray:
        return self.anchors.points

    def __len__(self) -> int:
        return len(self.anchors)


class DescriptorTensor(BaseModel):
    """|A|×|F| matrix Γ of statistical distances from each anchor to one point set."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    values: FloatArray
    functions: DistanceFunctionSet
    grid: AnchorGrid

    @model_validator(mode="after")
    def check_shape(self) -> "DescriptorTensor":
        expected = (len(self.grid), len(self.functions))
        if self.values.shape != expected:
            raise ValueError(f"descriptor shape {self.values.shape} != {expected}")
        if np.any(self.values < 0):
            raise ValueError("descriptor entries must be non-negative")
        return self


# === Settings Sections ===


class AnchorSettings(BaseModel):
    """Anchor lattice, optional FPS subsampling and the distance-function set."""

    model_config = ConfigDict(extra="forbid")

    stride: int = Field(default=1, ge=1)
    count: int | None = Field(default=None, ge=1)
    start_index: int = Field(default=0, ge=0)
    functions: list[DistanceFunction] = Field(default_factory=lambda: list(DISTANCE_ORDER))
    singular_eps: float = Field(default=1e-6, gt=0)

    def function_set(self) -> DistanceFunctionSet:
        return DistanceFunctionSet(functions=tuple(self.functions))


class PreprocessSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    min_area: int = Field(default=16, ge=1)
    remove_isolated: bool = True
    exclude_forehead: bool = True


class ProjectionSettings(BaseModel):
    """Visibility and target-consistency filters applied to predicted part points."""

    model_config = ConfigDict(extra="forbid")

    visibility_slack: float = Field(default=0.5, ge=0)
    occlusion_radius: float | None = Field(default=3.0, gt=0)
    forehead_cut: bool = True
    # `skin` also limits the occlusion filter to the target bounding box
    consistency_parts: ConsistencyScope = ConsistencyScope.ALL


class SoftSilhouetteConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    sigma: float = Field(default=1.5, gt=0)


class MetricSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    splat_radius: float = Field(default=1.0, ge=0)


class ScenarioSettings(BaseModel):
    """Synthetic benchmark scenario shared by the comparison and ablation harnesses."""

    model_config = ConfigDict(extra="forbid")

    kind: ScenarioKind = ScenarioKind.TOY
    seeds: list[int] = Field(default_factory=lambda: list(range(20)))
    resolution: int = Field(default=128, ge=16)
    n_vertices: int = Field(default=600, ge=1)
    k_id: int = Field(default=8, ge=1)
    k_exp: int = Field(default=6, ge=1)
    displacement_sigmas: float = Field(default=20.0, gt=0)
    losses: list[LossKind] = Field(default_factory=lambda: list(LossKind))
    # preset applied on top of [weights] for every benchmark fit; "config" uses [weights] as is
    weights_preset: WeightsPreset | Literal["config"] = "prdl-only"


# === Fitting ===


class LossWeights(BaseModel):
    """Balance weights λ and per-part weights w_prdl^p."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    prdl: float = Field(default=0.8e-3, ge=0)
    lmk: float = Field(default=1.6e-3, ge=0)
    reg: float = Field(default=3e-4, ge=0)
    exp_reg: float = Field(default=1.0, ge=0)
    part_weights: dict[PartLabel, float] = Field(
        default_factory=lambda: {part: 1.0 for part in PART_ORDER}
    )

    @field_validator("part_weights")
    @classmethod
    def non_negative(cls, v: dict[PartLabel, float]) -> dict[PartLabel, float]:
        if any(w < 0 for w in v.values()):
            raise ValueError("part weights must be non-negative")
        return {part: float(v.get(part, 1.0)) for part in PART_ORDER}

    @classmethod
    def preset(cls, name: WeightsPreset, base: "LossWeights | None" = None) -> "LossWeights":
        base = base or cls()
        if name == "standard":
            return base.model_copy(update={"prdl": 0.8e-3, "lmk": 1.6e-3, "reg": 3e-4})
        if name == "prdl-only":
            return base.model_copy(update={"lmk": 0.0})
        raise ValueError(f"unknown weights preset {name!r}")


class FitConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    max_iters: int = Field(default=2000, ge=1)
    learning_rate: float = Field(default=1e-4, gt=0)
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    epsilon: float = Field(default=1e-8, gt=0)
    tolerance: float = Field(default=1e-6, ge=0)
    patience: int = Field(default=20, ge=1)
    skin_point_cap: int = Field(default=3000, ge=1)
    seed: int = 0
    loss: LossKind = LossKind.PRDL
    fixed_groups: list[ParamGroup] = Field(default_factory=list)
    record_every: int = Field(default=1, ge=1)


class IterationRecord(BaseModel):
    """Loss decomposition at one iteration; `prdl` holds the geometric term in use."""

    iteration: int
    prdl: float
    lmk: float
    reg: float
    total: float


class IoUReport(BaseModel):
    per_part: dict[PartLabel, float]
    mean_iou: float
    height: int
    width: int

    @field_validator("per_part")
    @classmethod
    def in_unit_interval(cls, v: dict[PartLabel, float]) -> dict[PartLabel, float]:
        for part, value in v.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{part.value} IoU {value} outside [0, 1]")
        return v


class FitReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    seed: int
    loss: LossKind
    weights: LossWeights
    iterations: int
    termination: TerminationReason
    history: list[IterationRecord]
    final_params: ShapeParams
    iou: IoUReport
    diagnostics: dict[str, int] = Field(default_factory=dict)
    wall_time_s: float = 0.0

    @property
    def final_loss(self) -> float:
        return self.history[-1].total if self.history else float("nan")


# === Benchmarks ===


class GradCheckResult(BaseModel):
    name: str
    instances: int
    max_rel_error: float
    tolerance: float
    passed: bool


class RunResult(BaseModel):
    """One fit inside a comparison or ablation battery."""

    index: int
    seed: int
    variant: str
    mean_iou: float
    final_loss: float
    iterations: int
    termination: TerminationReason
    curve: list[float]
    init_grad_norm: float = 0.0
    wall_time_s: float = 0.0


class VariantSummary(BaseModel):
    variant: str
    mean_iou: float
    min_iou: float
    per_seed_iou: list[float]
    mean_iterations: float


class BenchTable(BaseModel):
    kind: Literal["comparison", "ablation"]
    scenario: ScenarioKind
    seeds: list[int]
    rows: list[VariantSummary]
    runs: list[RunResult]

    def row(self, variant: str) -> VariantSummary:
        for row in self.rows:
            if row.variant == variant:
                return row
        raise KeyError(variant)
