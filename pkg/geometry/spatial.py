"""
Nearest, furthest and mean distance queries over 2D point sets.

Distances are Euclidean throughout and ties resolve to the lowest point index.
"""

import logging
from collections.abc import Sequence

import numpy as np
from scipy.spatial import cKDTree

from errors import EmptySetError, InvalidArgumentError
from schemas.models import PointSet2D

logger = logging.getLogger(__name__)

# Queries per brute-force block; bounds the (queries × points) scratch matrix.
_BLOCK_ELEMENTS = 2_000_000
_TIE_RTOL = 1e-9


def point_distances(points: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Euclidean distance from one query to every point."""
    diff = points - query
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def _as_query(q: Sequence[float] | np.ndarray) -> np.ndarray:
    query = np.asarray(q, dtype=np.float64).reshape(-1)
    if query.shape != (2,) or not np.all(np.isfinite(query)):
        raise InvalidArgumentError(f"query must be a finite 2D point, got {q!r}")
    return query


def _as_queries(queries: np.ndarray) -> np.ndarray:
    queries = np.asarray(queries, dtype=np.float64).reshape(-1, 2)
    if not np.all(np.isfinite(queries)):
        raise InvalidArgumentError("queries must be finite")
    return queries


class SpatialIndex:
    """Immutable query structure over one non-empty point set (KD-tree plus cached points)."""

    __slots__ = ("_points", "_tree")

    def __init__(self, points: np.ndarray):
        points = np.array(points, dtype=np.float64).reshape(-1, 2)
        if points.shape[0] == 0:
            raise EmptySetError("cannot index an empty point set")
        points.setflags(write=False)
        self._points = points
        self._tree = cKDTree(points)

    @property
    def points(self) -> np.ndarray:
        return self._points

    def __len__(self) -> int:
        return int(self._points.shape[0])

    def nearest_many(self, queries: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Nearest point for each query row: (distances, indices)."""
        queries = _as_queries(queries)
        k = min(2, len(self))
        dist, idx = self._tree.query(queries, k=k)
        dist = dist.reshape(len(queries), k)
        idx = idx.reshape(len(queries), k).astype(np.int64)
        best = idx[:, 0].copy()
        if k == 2:
            ties = np.flatnonzero(np.isclose(dist[:, 0], dist[:, 1], rtol=_TIE_RTOL, atol=1e-12))
            for row in ties:
                radius = dist[row, 1] * (1.0 + _TIE_RTOL) + 1e-12
                candidates = np.array(sorted(self._tree.query_ball_point(queries[row], r=radius)))
                exact = point_distances(self._points[candidates], queries[row])
                best[row] = candidates[int(np.argmin(exact))]
        diff = self._points[best] - queries
        return np.sqrt(np.einsum("ij,ij->i", diff, diff)), best

    def furthest_many(self, queries: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Furthest point for each query row by blocked linear scan: (distances, indices)."""
        queries = _as_queries(queries)
        dist = np.empty(len(queries))
        idx = np.empty(len(queries), dtype=np.int64)
        block = max(1, _BLOCK_ELEMENTS // len(self))
        for start in range(0, len(queries), block):
            chunk = queries[start : start + block]
            diff = self._points[None, :, :] - chunk[:, None, :]
            d = np.sqrt(np.einsum("qpc,qpc->qp", diff, diff))
            sel = np.argmax(d, axis=1)
            idx[start : start + len(chunk)] = sel
            dist[start : start + len(chunk)] = d[np.arange(len(chunk)), sel]
        return dist, idx


def build_index(point_set: PointSet2D) -> SpatialIndex:
    """Build a query structure for the exact point list given."""
    if point_set.is_empty:
        raise EmptySetError("cannot build an index over an empty point set")
    return SpatialIndex(point_set.points)


def nearest_distance(index: SpatialIndex, q: Sequence[float] | np.ndarray) -> tuple[float, int]:
    dist, idx = index.nearest_many(_as_query(q)[None, :])
    return float(dist[0]), int(idx[0])


def furthest_distance(index: SpatialIndex, q: Sequence[float] | np.ndarray) -> tuple[float, int]:
    dist, idx = index.furthest_many(_as_query(q)[None, :])
    return float(dist[0]), int(idx[0])


def mean_distance(point_set: PointSet2D, q: Sequence[float] | np.ndarray) -> float:
    """Arithmetic mean of the distances from q to every point."""
    if point_set.is_empty:
        raise EmptySetError("mean distance of an empty point set is undefined")
    return float(point_distances(point_set.points, _as_query(q)).mean())
