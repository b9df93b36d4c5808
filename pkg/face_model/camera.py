"""
Camera projection to pixel coordinates (image y grows downward).
"""

import numpy as np

from errors import ProjectionError
from schemas.models import Camera, CameraMode, PartLabel, PointSet2D


def _depth(camera: Camera, vertices: np.ndarray) -> np.ndarray:
    depth = vertices[:, 2] + camera.depth_offset
    if np.any(depth <= 0):
        bad = int(np.argmax(depth <= 0))
        raise ProjectionError(f"vertex {bad} has nonpositive depth {depth[bad]:g}")
    return depth


def project_array(camera: Camera, vertices: np.ndarray) -> np.ndarray:
    """Project n×3 vertices to n×2 pixels."""
    vertices = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
    if camera.mode == CameraMode.ORTHOGRAPHIC:
        scale = np.full(len(vertices), camera.scale)
    else:
        scale = camera.focal / _depth(camera, vertices)
    return np.stack(
        [scale * vertices[:, 0] + camera.cx, -scale * vertices[:, 1] + camera.cy], axis=1
    )


def project(camera: Camera, vertices: np.ndarray, label: PartLabel | None = None) -> PointSet2D:
    return PointSet2D(points=project_array(camera, vertices), label=label)


def projection_derivatives(camera: Camera, vertices: np.ndarray) -> np.ndarray:
    """Per-vertex 2×3 Jacobians ∂(x, y)/∂(X, Y, Z), shape n×2×3."""
    vertices = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
    n = len(vertices)
    jac = np.zeros((n, 2, 3))
    if camera.mode == CameraMode.ORTHOGRAPHIC:
        jac[:, 0, 0] = camera.scale
        jac[:, 1, 1] = -camera.scale
        return jac
    depth = _depth(camera, vertices)
    scale = camera.focal / depth
    jac[:, 0, 0] = scale
    jac[:, 0, 2] = -camera.focal * vertices[:, 0] / depth**2
    jac[:, 1, 1] = -scale
    jac[:, 1, 2] = camera.focal * vertices[:, 1] / depth**2
    return jac
