"""
Derivatives of projected vertices with respect to the shape parameters.

Parameter order is (α_id, α_exp, α_a, α_t); Jacobian rows are 2v (x) and
2v + 1 (y) for vertex v.
"""

import numpy as np

from errors import InvalidArgumentError
from face_model.blendshape import deformed_shape, rotation_derivatives, rotation_matrix
from face_model.camera import projection_derivatives
from schemas.models import BlendshapeModel, Camera, ShapeParams


def parameter_jacobian(model: BlendshapeModel, camera: Camera, params: ShapeParams) -> np.ndarray:
    """
    Full Jacobian ∂V_2d/∂α.

    Args:
        model: Blendshape model
        camera: Projection
        params: Point of evaluation

    Returns:
        (2n, k_id + k_exp + 6) array
    """
    n = model.n_vertices
    shape = deformed_shape(model, params)
    rot = rotation_matrix(params.alpha_a)
    vertices = shape @ rot.T + params.alpha_t
    dproj = projection_derivatives(camera, vertices)

    basis_id = np.einsum("ij,njk->nik", rot, model.identity_basis.reshape(n, 3, model.k_id))
    basis_exp = np.einsum("ij,njk->nik", rot, model.expression_basis.reshape(n, 3, model.k_exp))
    rotated = np.stack([shape @ d.T for d in rotation_derivatives(params.alpha_a)], axis=2)

    blocks = [
        np.einsum("npi,nik->npk", dproj, basis_id),
        np.einsum("npi,nik->npk", dproj, basis_exp),
        np.einsum("npi,nik->npk", dproj, rotated),
        dproj,
    ]
    return np.concatenate(blocks, axis=2).reshape(2 * n, model.n_params)


def vector_jacobian_product(
    model: BlendshapeModel, camera: Camera, params: ShapeParams, point_grads: np.ndarray
) -> np.ndarray:
    """
    ∂L/∂α from per-vertex 2D gradients ∂L/∂V_2d without forming the Jacobian.

    Equal to `parameter_jacobian(...).T @ point_grads.ravel()`.
    """
    n = model.n_vertices
    point_grads = np.asarray(point_grads, dtype=np.float64)
    if point_grads.shape != (n, 2):
        raise InvalidArgumentError(f"point gradients must be {n}×2, got {point_grads.shape}")
    shape = deformed_shape(model, params)
    rot = rotation_matrix(params.alpha_a)
    vertices = shape @ rot.T + params.alpha_t

    grad_vertices = np.einsum("np,npi->ni", point_grads, projection_derivatives(camera, vertices))
    grad_shape = (grad_vertices @ rot).ravel()
    grad_angles = [
        float(np.sum(grad_vertices * (shape @ d.T))) for d in rotation_derivatives(params.alpha_a)
    ]
    return np.concatenate(
        [
            model.identity_basis.T @ grad_shape,
            model.expression_basis.T @ grad_shape,
            np.array(grad_angles),
            grad_vertices.sum(axis=0),
        ]
    )
