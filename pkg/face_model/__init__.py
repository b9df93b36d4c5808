"""
Blendshape face model: assembly, projection, Jacobians, part annotation and the toy generator.
"""

from .annotation import annotate_parts, annotate_parts_multi, read_annotation, write_annotation
from .blendshape import (
    assemble_vertices,
    deformed_shape,
    rotation_derivatives,
    rotation_matrix,
)
from .camera import project, project_array, projection_derivatives
from .jacobian import parameter_jacobian, vector_jacobian_product
from .parts import TargetConsistency, part_points, select_part_vertices, visible_mask
from .storage import load_model, save_model
from .toy import (
    gen_toy_model,
    rasterize_toy_labels,
    rasterize_toy_targets,
    toy_camera,
    toy_landmarks,
)

__all__ = [
    "TargetConsistency",
    "annotate_parts",
    "annotate_parts_multi",
    "assemble_vertices",
    "deformed_shape",
    "gen_toy_model",
    "load_model",
    "parameter_jacobian",
    "part_points",
    "project",
    "project_array",
    "projection_derivatives",
    "rasterize_toy_labels",
    "rasterize_toy_targets",
    "read_annotation",
    "rotation_derivatives",
    "rotation_matrix",
    "save_model",
    "select_part_vertices",
    "toy_camera",
    "toy_landmarks",
    "vector_jacobian_product",
    "visible_mask",
    "write_annotation",
]
