"""
Linear blendshape model: shape deformation, rotation and vertex assembly.
"""

import numpy as np

from errors import InvalidArgumentError
from schemas.models import BlendshapeModel, ShapeParams


def _rx(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _ry(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _rz(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _drx(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[0.0, 0.0, 0.0], [0.0, -s, -c], [0.0, c, -s]])


def _dry(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[-s, 0.0, c], [0.0, 0.0, 0.0], [-c, 0.0, -s]])


def _drz(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[-s, -c, 0.0], [c, -s, 0.0], [0.0, 0.0, 0.0]])


def rotation_matrix(alpha_a: np.ndarray) -> np.ndarray:
    """
    Rotation for (pitch, yaw, roll) in radians.

    Returns:
        R = Rz(roll) · Ry(yaw) · Rx(pitch)
    """
    pitch, yaw, roll = np.asarray(alpha_a, dtype=np.float64).reshape(3)
    return _rz(roll) @ _ry(yaw) @ _rx(pitch)


def rotation_derivatives(alpha_a: np.ndarray) -> np.ndarray:
    """∂R/∂(pitch, yaw, roll) stacked as a 3×3×3 array, angle first."""
    pitch, yaw, roll = np.asarray(alpha_a, dtype=np.float64).reshape(3)
    rx, ry, rz = _rx(pitch), _ry(yaw), _rz(roll)
    return np.stack(
        [
            rz @ ry @ _drx(pitch),
            rz @ _dry(yaw) @ rx,
            _drz(roll) @ ry @ rx,
        ]
    )


def check_params(model: BlendshapeModel, params: ShapeParams) -> None:
    if params.alpha_id.shape != (model.k_id,) or params.alpha_exp.shape != (model.k_exp,):
        raise InvalidArgumentError(
            f"params have k_id={params.alpha_id.size}, k_exp={params.alpha_exp.size}; "
            f"model expects {model.k_id}, {model.k_exp}"
        )


def deformed_shape(model: BlendshapeModel, params: ShapeParams) -> np.ndarray:
    """V̄ + A_id α_id + A_exp α_exp as an n×3 array (before pose)."""
    check_params(model, params)
    offsets = model.identity_basis @ params.alpha_id + model.expression_basis @ params.alpha_exp
    return model.mean_shape + offsets.reshape(model.n_vertices, 3)


def assemble_vertices(model: BlendshapeModel, params: ShapeParams) -> np.ndarray:
    """R(α_a)(V̄ + A_id α_id + A_exp α_exp) + α_t, one row per vertex."""
    shape = deformed_shape(model, params)
    return shape @ rotation_matrix(params.alpha_a).T + params.alpha_t
