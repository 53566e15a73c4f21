"""Baseline distance metrics: Chamfer, Hausdorff and exact EMD.

These are the classical uni-dimensional similarity measures kept around
for comparison tables. All use plain Euclidean (L2) distances.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from .errors import BijectivityError, EmptyCloudError, InstanceTooLargeError
from .model import PointCloud


def _points(cloud) -> np.ndarray:
    pts = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, dtype=np.float64)
    if pts.shape[0] == 0:
        raise EmptyCloudError("baseline distance on an empty cloud")
    return pts


def _directed_nn(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """For each src point, distance to its nearest dst point."""
    d, _ = cKDTree(dst).query(src, k=1)
    return np.atleast_1d(d)


def chamfer_distance(a, b, squared: bool = False) -> float:
    """Sum over both clouds of each point's nearest-neighbor distance.

    squared=True sums squared distances instead, for cross-checking
    against tools that use that convention.
    """
    pa, pb = _points(a), _points(b)
    d_ab = _directed_nn(pa, pb)
    d_ba = _directed_nn(pb, pa)
    if squared:
        d_ab = d_ab * d_ab
        d_ba = d_ba * d_ba
    return float(np.sum(d_ab) + np.sum(d_ba))


def hausdorff_distance(a, b) -> float:
    """Larger of the two directed sup-inf distances between the clouds."""
    pa, pb = _points(a), _points(b)
    return float(max(np.max(_directed_nn(pa, pb)), np.max(_directed_nn(pb, pa))))


def emd_exact(a, b, max_points: int = 4096) -> float:
    """Minimum total distance over bijective matchings of the two clouds.

    Solved exactly via optimal assignment on the full distance matrix.
    Requires equal sizes (the matching is a bijection) and refuses
    instances above max_points rather than approximating: at that scale
    the result stops being informative and the cost becomes prohibitive.
    Resampling to equal/smaller size is the caller's explicit choice.
    """
    pa, pb = _points(a), _points(b)
    if pa.shape[0] != pb.shape[0]:
        raise BijectivityError(
            f"EMD needs equal-size clouds, got {pa.shape[0]} vs {pb.shape[0]}"
        )
    if pa.shape[0] > max_points:
        raise InstanceTooLargeError(
            f"EMD instance of {pa.shape[0]} points exceeds cap of {max_points}"
        )
    cost = cdist(pa, pb)
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum())
