"""Nearest-neighbor indexing, voxel occupancy and region partitioning.

This is the geometric engine every metric sits on. Nearest-neighbor
queries are exact (kd-tree, O(n log n) build / O(log n) query expected);
approximate search would change metric values, so it is deliberately
not offered.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateInputError, EmptyCloudError, InvalidInputError
from .model import CellSet, PointCloud, RegionPartition, cell_keys_of, joint_aabb


class NNIndex:
    """Exact nearest-neighbor index over a fixed point set."""

    def __init__(self, points: np.ndarray):
        points = np.asarray(points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != 3:
            raise InvalidInputError(f"points must be (N, 3), got {points.shape}")
        if points.shape[0] == 0:
            raise EmptyCloudError("cannot index an empty point set")
        if not np.all(np.isfinite(points)):
            raise InvalidInputError("points contain NaN or Inf")
        self._points = points
        self._tree = cKDTree(points)

    def __len__(self) -> int:
        return self._points.shape[0]

    def query(self, queries: np.ndarray, k: int = 1) -> tuple[np.ndarray, np.ndarray]:
        """Distances and indices of the k nearest indexed points."""
        return self._tree.query(np.asarray(queries, dtype=np.float64), k=k)


def build_nn_index(points) -> NNIndex:
    if isinstance(points, PointCloud):
        points = points.points
    return NNIndex(np.asarray(points, dtype=np.float64))


def nearest_distance(index: NNIndex, q, exclude_identical_index: Optional[int] = None) -> float:
    """Exact distance from q to the nearest indexed point.

    With exclude_identical_index, the point stored at that index is
    skipped: this is how the intra-cloud mean spacing excludes each
    query point itself.
    """
    q = np.asarray(q, dtype=np.float64).reshape(1, 3)
    if exclude_identical_index is None:
        d, _ = index.query(q, k=1)
        return float(d[0])
    if len(index) < 2:
        raise DegenerateInputError("self-exclusion needs an index with >= 2 points")
    d, i = index.query(q, k=2)
    for dist, idx in zip(d[0], i[0]):
        if int(idx) != exclude_identical_index:
            return float(dist)
    raise DegenerateInputError("no neighbor left after exclusion")


def mean_nn_distance(points) -> float:
    """Mean over all points of the distance to the nearest other point.

    Duplicated points contribute zero distance, matching the definition
    (nearest *other* point, by index).
    """
    if isinstance(points, PointCloud):
        points = points.points
    points = np.asarray(points, dtype=np.float64)
    if points.shape[0] < 2:
        raise DegenerateInputError(
            f"mean nearest-neighbor spacing needs >= 2 points, got {points.shape[0]}"
        )
    tree = cKDTree(points)
    d, _ = tree.query(points, k=2)
    # column 0 is each point's zero self-distance (or a duplicate's zero)
    return float(np.mean(d[:, 1]))


def _pack_keys(keys: np.ndarray):
    """Flatten (N, 3) integer keys to 1-D codes for fast sort/unique.

    Returns (codes, unpack) or None when the key extents are so large
    that packing would overflow int64 (callers then fall back to the
    row-wise path).
    """
    lo = keys.min(axis=0)
    span = keys.max(axis=0) - lo + 1
    if int(span[0]) * int(span[1]) * int(span[2]) > 2**62:
        return None
    shifted = keys - lo
    codes = (shifted[:, 0] * span[1] + shifted[:, 1]) * span[2] + shifted[:, 2]

    def unpack(code_array: np.ndarray) -> np.ndarray:
        k = code_array % span[2]
        rest = code_array // span[2]
        j = rest % span[1]
        i = rest // span[1]
        return np.stack([i + lo[0], j + lo[1], k + lo[2]], axis=1)

    return codes, unpack


def _unique_rows(keys: np.ndarray) -> np.ndarray:
    packed = _pack_keys(keys)
    if packed is None:
        return np.unique(keys, axis=0)
    codes, unpack = packed
    return unpack(np.unique(codes))


def voxelize(points, epsilon: float, origin) -> CellSet:
    """Set of voxel indices occupied by the points at resolution epsilon."""
    if isinstance(points, PointCloud):
        points = points.points
    points = np.asarray(points, dtype=np.float64)
    if points.shape[0] == 0:
        raise EmptyCloudError("cannot voxelize an empty point set")
    origin = np.asarray(origin, dtype=np.float64)
    keys = cell_keys_of(points, origin, epsilon)
    cells = frozenset(map(tuple, _unique_rows(keys).tolist()))
    return CellSet(cells=cells, origin=tuple(origin.tolist()), epsilon=float(epsilon))


def _group_by_region(keys: np.ndarray) -> dict:
    """Map region key -> indices (original order) of rows carrying that key."""
    if keys.shape[0] == 0:
        return {}
    packed = _pack_keys(keys)
    if packed is None:
        unique, inverse = np.unique(keys, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        order = np.argsort(inverse, kind="stable")
        counts = np.bincount(inverse, minlength=unique.shape[0])
        groups = np.split(order, np.cumsum(counts)[:-1])
        return {tuple(k): idx for k, idx in zip(unique.tolist(), groups)}
    codes, unpack = packed
    order = np.argsort(codes, kind="stable")
    sorted_codes = codes[order]
    starts = np.flatnonzero(np.diff(sorted_codes)) + 1
    groups = np.split(order, starts)
    unique = unpack(sorted_codes[np.concatenate(([0], starts))])
    return {tuple(k): idx for k, idx in zip(unique.tolist(), groups)}


def partition_regions(ref: PointCloud, cand: PointCloud, region_size: float) -> RegionPartition:
    """Assign every point of both clouds to a cubic region of edge region_size.

    The region grid is anchored at the min corner of the joint bounding
    box, so the same physical volume gets the same key in both clouds.
    """
    if not (np.isfinite(region_size) and region_size > 0):
        raise InvalidInputError(f"region_size must be > 0, got {region_size}")
    ref.require_points()
    cand.require_points()
    origin = joint_aabb(ref, cand).min_corner

    ref_groups = _group_by_region(cell_keys_of(ref.points, origin, region_size))
    cand_groups = _group_by_region(cell_keys_of(cand.points, origin, region_size))

    empty = np.empty(0, dtype=np.int64)
    regions = {}
    for key in set(ref_groups) | set(cand_groups):
        regions[key] = (ref_groups.get(key, empty), cand_groups.get(key, empty))
    return RegionPartition(
        region_size=float(region_size),
        origin=tuple(origin.tolist()),
        regions=regions,
    )
