"""
Unit tests for the nearest-neighbour and soft-silhouette baselines.
"""

import numpy as np
import pytest

from baselines import chamfer_loss, nn_loss_directed, soft_occupancy, soft_silhouette_iou_loss
from errors import EmptySetError
from fitting.gradcheck import central_difference, relative_error
from schemas.models import PartMask, PointSet2D, SoftSilhouetteConfig

ORIGIN = np.array([[0.0, 0.0]])


def _square_mask(size: int, x0: int, y0: int, side: int) -> PartMask:
    bits = np.zeros((size, size), dtype=bool)
    bits[y0 : y0 + side, x0 : x0 + side] = True
    return PartMask(bits=bits)


class TestNearestNeighbourLosses:
    """Tests for nn_loss_directed and chamfer_loss."""

    @pytest.mark.unit
    def test_identical_sets(self, two_point_set):
        assert nn_loss_directed(two_point_set, two_point_set)[0] == 0.0
        assert chamfer_loss(two_point_set, two_point_set)[0] == 0.0

    @pytest.mark.unit
    def test_single_pair(self):
        assert nn_loss_directed(ORIGIN, np.array([[3.0, 4.0]]))[0] == 25.0
        assert chamfer_loss(ORIGIN, np.array([[3.0, 4.0]]))[0] == 50.0

    @pytest.mark.unit
    def test_direction_matters(self):
        far = np.array([[0.0, 0.0], [6.0, 8.0]])
        assert nn_loss_directed(ORIGIN, far)[0] == 0.0
        assert nn_loss_directed(far, ORIGIN)[0] == 50.0
        assert chamfer_loss(ORIGIN, far)[0] == 50.0

    @pytest.mark.unit
    def test_chamfer_symmetric_value(self, rng):
        for _ in range(20):
            a, b = rng.uniform(0, 10, size=(5, 2)), rng.uniform(0, 10, size=(7, 2))
            assert chamfer_loss(a, b)[0] == pytest.approx(chamfer_loss(b, a)[0], rel=1e-12)

    @pytest.mark.unit
    def test_empty_sets(self):
        with pytest.raises(EmptySetError):
            nn_loss_directed(PointSet2D(), ORIGIN)
        with pytest.raises(EmptySetError):
            chamfer_loss(ORIGIN, PointSet2D())

    @pytest.mark.unit
    def test_gradients_match_finite_differences(self, rng):
        for _ in range(20):
            pred, target = rng.uniform(0, 10, size=(6, 2)), rng.uniform(0, 10, size=(4, 2))
            _, grad_forward, _ = nn_loss_directed(pred, target)
            numeric = central_difference(lambda p: nn_loss_directed(p, target)[0], pred)
            assert relative_error(grad_forward, numeric) < 1e-5

            _, _, grad_backward = nn_loss_directed(target, pred)
            numeric = central_difference(lambda p: nn_loss_directed(target, p)[0], pred)
            assert relative_error(grad_backward, numeric) < 1e-5

            _, grad = chamfer_loss(pred, target)
            numeric = central_difference(lambda p: chamfer_loss(p, target)[0], pred)
            assert relative_error(grad, numeric) < 1e-5


class TestSoftSilhouette:
    """Tests for the soft silhouette IoU loss."""

    @pytest.mark.unit
    def test_occupancy_peaks_at_points(self):
        occupancy, survival = soft_occupancy(np.array([[2.0, 1.0]]), 4, 4, 1.0)
        assert occupancy.shape == (16,)
        assert occupancy[1 * 4 + 2] == pytest.approx(1.0)
        np.testing.assert_allclose(occupancy + survival, 1.0)

    @pytest.mark.unit
    def test_exact_fill_with_small_sigma(self):
        mask = _square_mask(12, 3, 4, 3)
        rows, cols = np.nonzero(mask.bits)
        pred = np.column_stack([cols, rows]).astype(float)
        value, _ = soft_silhouette_iou_loss(pred, mask, SoftSilhouetteConfig(sigma=0.1))
        assert value == pytest.approx(0.0, abs=1e-6)

    @pytest.mark.unit
    def test_loss_in_unit_interval(self, rng):
        mask = _square_mask(16, 4, 4, 6)
        for _ in range(10):
            value, _ = soft_silhouette_iou_loss(rng.uniform(0, 16, size=(5, 2)), mask)
            assert 0.0 <= value <= 1.0

    @pytest.mark.unit
    def test_far_prediction_has_vanishing_gradient(self):
        mask = _square_mask(64, 4, 4, 6)
        pred = np.array([[50.0, 50.0], [52.0, 50.0], [51.0, 52.0]])
        value, grad = soft_silhouette_iou_loss(pred, mask, SoftSilhouetteConfig(sigma=1.5))
        assert value == pytest.approx(1.0)
        assert np.linalg.norm(grad) < 1e-8

    @pytest.mark.unit
    def test_empty_target(self):
        value, grad = soft_silhouette_iou_loss(ORIGIN, PartMask.empty(8, 8))
        assert value == 1.0
        np.testing.assert_array_equal(grad, np.zeros((1, 2)))

    @pytest.mark.unit
    def test_empty_prediction(self):
        with pytest.raises(EmptySetError):
            soft_silhouette_iou_loss(PointSet2D(), _square_mask(8, 1, 1, 2))

    @pytest.mark.unit
    def test_gradient_matches_finite_differences(self, rng):
        mask = _square_mask(12, 3, 3, 5)
        cfg = SoftSilhouetteConfig(sigma=1.5)
        for _ in range(10):
            pred = rng.uniform(2, 9, size=(4, 2))
            _, grad = soft_silhouette_iou_loss(pred, mask, cfg)
            numeric = central_difference(lambda p: soft_silhouette_iou_loss(p, mask, cfg)[0], pred)
            assert relative_error(grad, numeric) < 1e-5
