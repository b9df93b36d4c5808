"""
Unit tests for the spatial index, farthest point sampling and disc splatting.
"""

import numpy as np
import pytest

from errors import EmptySetError, InvalidArgumentError
from geometry.raster import splat_disc_mask
from geometry.sampling import farthest_point_sampling, fps_indices
from geometry.spatial import (
    SpatialIndex,
    build_index,
    furthest_distance,
    mean_distance,
    nearest_distance,
)
from schemas.models import PointSet2D


class TestSpatialIndex:
    """Tests for nearest/furthest queries."""

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "query, expected",
        [((0, 0), (0.0, 0)), ((3, 0), (3.0, 0)), ((6, 8), (5.0, 1))],
    )
    def test_nearest_examples(self, two_point_set, query, expected):
        distance, nearest = nearest_distance(build_index(two_point_set), query)
        assert distance == pytest.approx(expected[0])
        assert nearest == expected[1]

    @pytest.mark.unit
    def test_furthest_examples(self, two_point_set):
        assert furthest_distance(build_index(two_point_set), (0, 0)) == (5.0, 1)
        assert furthest_distance(build_index(PointSet2D(points=np.array([[0.0, 0.0]]))), (3, 4)) == (5.0, 0)

    @pytest.mark.unit
    def test_singleton_answers_every_query(self):
        index = build_index(PointSet2D(points=np.array([[5.0, 5.0]])))
        for q in [(0, 0), (5, 5), (-3, 9)]:
            d, i = nearest_distance(index, q)
            assert i == 0
            assert d == pytest.approx(np.hypot(q[0] - 5, q[1] - 5))

    @pytest.mark.unit
    def test_ties_go_to_lowest_index(self):
        points = np.array([[2.0, 0.0], [-2.0, 0.0], [0.0, 2.0], [0.0, -2.0]])
        index = SpatialIndex(points)
        assert nearest_distance(index, (0, 0)) == (2.0, 0)
        assert furthest_distance(index, (0, 0)) == (2.0, 0)

    @pytest.mark.unit
    def test_duplicate_points_tie_to_lowest_index(self):
        index = SpatialIndex(np.array([[1.0, 1.0], [4.0, 4.0], [1.0, 1.0]]))
        assert nearest_distance(index, (1.2, 1.0))[1] == 0

    @pytest.mark.unit
    def test_matches_brute_force(self, rng):
        points = rng.uniform(0, 100, size=(1000, 2))
        queries = rng.uniform(-10, 110, size=(200, 2))
        index = SpatialIndex(points)
        dist = np.linalg.norm(points[None, :, :] - queries[:, None, :], axis=2)

        near_d, near_i = index.nearest_many(queries)
        far_d, far_i = index.furthest_many(queries)

        np.testing.assert_array_equal(near_i, np.argmin(dist, axis=1))
        np.testing.assert_array_equal(far_i, np.argmax(dist, axis=1))
        np.testing.assert_allclose(near_d, dist.min(axis=1), rtol=1e-12)
        np.testing.assert_allclose(far_d, dist.max(axis=1), rtol=1e-12)

    @pytest.mark.unit
    def test_empty_set_raises(self):
        with pytest.raises(EmptySetError):
            build_index(PointSet2D())

    @pytest.mark.unit
    def test_index_is_read_only(self, two_point_set):
        index = build_index(two_point_set)
        with pytest.raises(ValueError):
            index.points[0, 0] = 9.0

    @pytest.mark.unit
    def test_rejects_non_finite_query(self, two_point_set):
        with pytest.raises(InvalidArgumentError):
            nearest_distance(build_index(two_point_set), (np.nan, 0))


class TestMeanDistance:
    """Tests for mean_distance."""

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "points, query, expected",
        [
            ([[0, 0], [6, 8]], (0, 0), 5.0),
            ([[1, 1]], (1, 1), 0.0),
            ([[0, 0], [3, 0], [0, 4]], (0, 0), 7.0 / 3.0),
        ],
    )
    def test_examples(self, points, query, expected):
        point_set = PointSet2D(points=np.array(points, dtype=float))
        assert mean_distance(point_set, query) == pytest.approx(expected)

    @pytest.mark.unit
    def test_empty_set_raises(self):
        with pytest.raises(EmptySetError):
            mean_distance(PointSet2D(), (0, 0))

    @pytest.mark.unit
    def test_between_nearest_and_furthest(self, rng):
        points = PointSet2D(points=rng.normal(size=(50, 2)))
        index = build_index(points)
        for q in rng.normal(size=(20, 2)):
            assert nearest_distance(index, q)[0] <= mean_distance(points, q) <= furthest_distance(index, q)[0]


class TestFarthestPointSampling:
    """Tests for fps_indices / farthest_point_sampling."""

    @pytest.mark.unit
    def test_k2_picks_outlier(self, fps_set):
        np.testing.assert_array_equal(fps_indices(fps_set.points, 2, 0), [0, 3])

    @pytest.mark.unit
    def test_k3_tie_goes_to_lowest_index(self, fps_set):
        result = farthest_point_sampling(fps_set, 3, 0)
        np.testing.assert_array_equal(result.points, [[0, 0], [10, 10], [1, 0]])

    @pytest.mark.unit
    def test_k_equals_size_returns_everything(self, fps_set):
        assert sorted(fps_indices(fps_set.points, 4).tolist()) == [0, 1, 2, 3]

    @pytest.mark.unit
    def test_duplicates_are_never_reselected(self):
        points = np.array([[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]])
        assert sorted(fps_indices(points, 3).tolist()) == [0, 1, 2]

    @pytest.mark.unit
    @pytest.mark.parametrize("k, start", [(0, 0), (5, 0), (2, 4), (2, -1)])
    def test_out_of_range(self, fps_set, k, start):
        with pytest.raises(InvalidArgumentError):
            fps_indices(fps_set.points, k, start)

    @pytest.mark.unit
    @pytest.mark.parametrize("seed", range(5))
    def test_greedy_max_min_matches_brute_force(self, seed):
        points = np.random.default_rng(seed).uniform(0.0, 10.0, size=(12, 2))
        selected = fps_indices(points, 6, 0).tolist()
        for step in range(1, len(selected)):
            chosen = points[selected[:step]]
            gaps = np.linalg.norm(points[:, None, :] - chosen[None, :, :], axis=2).min(axis=1)
            gaps[selected[:step]] = -1.0
            assert selected[step] == int(np.argmax(gaps))

    @pytest.mark.unit
    def test_keeps_label(self, fps_set):
        labelled = PointSet2D(points=fps_set.points, label="nose")
        assert farthest_point_sampling(labelled, 2).label == labelled.label


class TestSplatDiscMask:
    """Tests for disc splatting."""

    @pytest.mark.unit
    def test_radius_zero_marks_single_pixel(self):
        mask = splat_disc_mask(np.array([[3.0, 2.0]]), 6, 6, 0.0)
        assert mask.sum() == 1
        assert mask[2, 3]

    @pytest.mark.unit
    def test_empty_input(self):
        assert not splat_disc_mask(np.empty((0, 2)), 5, 5, 1.0).any()

    @pytest.mark.unit
    def test_clipped_to_image(self):
        mask = splat_disc_mask(np.array([[0.0, 0.0], [20.0, 20.0]]), 5, 5, 1.0)
        assert mask.shape == (5, 5)
        assert mask[0, 0] and mask[0, 1] and mask[1, 0]

    @pytest.mark.unit
    def test_lattice_becomes_solid_rectangle(self):
        xs, ys = np.meshgrid(np.arange(5, 15, 2.0), np.arange(5, 13, 2.0))
        mask = splat_disc_mask(np.column_stack([xs.ravel(), ys.ravel()]), 20, 20, 1.0)
        assert mask[5:12, 5:14].all()

    @pytest.mark.unit
    def test_interior_translation_equivariance(self):
        points = np.array([[6.0, 7.0], [8.0, 7.5], [7.2, 9.0]])
        base = splat_disc_mask(points, 30, 30, 1.5)
        shifted = splat_disc_mask(points + [5, 3], 30, 30, 1.5)
        np.testing.assert_array_equal(np.roll(np.roll(base, 3, axis=0), 5, axis=1), shifted)

    @pytest.mark.unit
    def test_negative_radius(self):
        with pytest.raises(InvalidArgumentError):
            splat_disc_mask(np.zeros((1, 2)), 4, 4, -1.0)
