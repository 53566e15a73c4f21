"""Deterministic degradation generators for ablation experiments.

Every generator is pure: the same inputs and seed give a bit-identical
output cloud, and inputs are never mutated. Randomness comes from
numpy's seeded PCG64 generator; the algorithm name is recorded in the
ablation manifests so fixtures stay stable across releases.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import EmptyResultError, InvalidInputError
from .model import PointCloud, as_point

PRNG_ALGORITHM = "numpy-pcg64"

_AXES = {"x": 0, "y": 1, "z": 2}


def downsample_uniform(cloud: PointCloud, keep_fraction: float, seed: int) -> PointCloud:
    """Keep ceil(keep_fraction * n) points chosen uniformly at random.

    Survivors keep their original relative order.
    """
    if not 0.0 < keep_fraction <= 1.0:
        raise InvalidInputError(f"keep_fraction must be in (0, 1], got {keep_fraction}")
    cloud.require_points()
    n = len(cloud)
    m = math.ceil(keep_fraction * n)
    if m >= n:
        return PointCloud(cloud.points.copy(), label=cloud.label)
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(n, size=m, replace=False))
    return PointCloud(cloud.points[chosen], label=cloud.label)


def add_gaussian_noise(cloud: PointCloud, sigma: float, seed: int) -> PointCloud:
    """Perturb each coordinate independently with N(0, sigma^2) noise."""
    if not (np.isfinite(sigma) and sigma >= 0.0):
        raise InvalidInputError(f"sigma must be >= 0, got {sigma}")
    cloud.require_points()
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, sigma, size=cloud.points.shape)
    return PointCloud(cloud.points + noise, label=cloud.label)


def crop_axis(cloud: PointCloud, axis: str, keep_fraction: float) -> PointCloud:
    """Keep points whose axis coordinate lies in the lower keep_fraction
    of the cloud's own extent along that axis. Deterministic, no seed."""
    if not 0.0 < keep_fraction <= 1.0:
        raise InvalidInputError(f"keep_fraction must be in (0, 1], got {keep_fraction}")
    ax = _AXES.get(str(axis).lower())
    if ax is None:
        raise InvalidInputError(f"axis must be one of X, Y, Z, got {axis!r}")
    cloud.require_points()
    if keep_fraction == 1.0:
        return PointCloud(cloud.points.copy(), label=cloud.label)
    coords = cloud.points[:, ax]
    lo = coords.min()
    threshold = lo + keep_fraction * (coords.max() - lo)
    mask = coords <= threshold
    if not mask.any():
        raise EmptyResultError(f"crop along {axis} removed every point")
    return PointCloud(cloud.points[mask], label=cloud.label)


def shift(cloud: PointCloud, offset) -> PointCloud:
    """Translate every point by offset; count and order unchanged."""
    offset = as_point(offset)
    cloud.require_points()
    return PointCloud(cloud.points + offset, label=cloud.label)
