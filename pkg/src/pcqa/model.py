"""Core domain types: point clouds, grids, configs and report structures.

Everything here is plain data. All instances are immutable after
construction and safe to share across worker threads; the geometry
algorithms live in the other modules.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, EmptyCloudError, InvalidInputError

# A voxel / region key is an integer (i, j, k) triple on a shared grid.
CellKey = tuple[int, int, int]


def as_point(value) -> np.ndarray:
    """Coerce a length-3 array-like into a finite float64 vector."""
    p = np.asarray(value, dtype=np.float64).reshape(-1)
    if p.shape != (3,):
        raise InvalidInputError(f"expected 3 coordinates, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise InvalidInputError(f"non-finite coordinates: {p}")
    return p


@dataclass(frozen=True)
class PointCloud:
    """An ordered set of 3D points in meters.

    ``points`` is an (N, 3) float64 array, made read-only on construction
    so clouds can be shared freely between threads.
    """

    points: np.ndarray
    label: str = ""

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise InvalidInputError(f"points must be (N, 3), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InvalidInputError("point cloud contains NaN or Inf coordinates")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    def require_points(self, minimum: int = 1) -> None:
        if len(self) < minimum:
            raise EmptyCloudError(
                f"cloud {self.label!r} has {len(self)} points, need >= {minimum}"
            )

    def aabb(self) -> "Aabb":
        self.require_points()
        return Aabb(self.points.min(axis=0), self.points.max(axis=0))


@dataclass(frozen=True)
class Aabb:
    """Axis-aligned bounding box, min_corner <= max_corner componentwise."""

    min_corner: np.ndarray
    max_corner: np.ndarray

    def __post_init__(self):
        lo = as_point(self.min_corner)
        hi = as_point(self.max_corner)
        if np.any(lo > hi):
            raise InvalidInputError(f"Aabb min {lo} exceeds max {hi}")
        lo.flags.writeable = False
        hi.flags.writeable = False
        object.__setattr__(self, "min_corner", lo)
        object.__setattr__(self, "max_corner", hi)

    def union(self, other: "Aabb") -> "Aabb":
        return Aabb(
            np.minimum(self.min_corner, other.min_corner),
            np.maximum(self.max_corner, other.max_corner),
        )

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of points inside the box (closed on all faces)."""
        return np.all((points >= self.min_corner) & (points <= self.max_corner), axis=1)

    def to_dict(self) -> dict:
        return {"min": self.min_corner.tolist(), "max": self.max_corner.tolist()}


def joint_aabb(a: PointCloud, b: PointCloud) -> Aabb:
    return a.aabb().union(b.aabb())


@dataclass(frozen=True)
class MetricConfig:
    """Hyper-parameters shared by every quality metric.

    epsilon is the cell edge length (the precision the user cares about);
    region_size is the edge length of the cubic regions that localize the
    resolution/accuracy computation. clamp_scores caps per-region
    resolution ratios at 1 so a candidate denser than the reference does
    not score above 1 (raw ratios are kept in a debug field).
    """

    epsilon: float
    region_size: float
    clamp_scores: bool = True

    def __post_init__(self):
        if not (np.isfinite(self.epsilon) and self.epsilon > 0):
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}")
        if not (np.isfinite(self.region_size) and self.region_size > 0):
            raise ConfigError(f"region_size must be > 0, got {self.region_size}")
        if self.region_size < self.epsilon:
            raise ConfigError(
                f"region_size ({self.region_size}) must be >= epsilon ({self.epsilon})"
            )

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "region_size": self.region_size,
            "clamp_scores": self.clamp_scores,
        }


def cell_key_of(p, origin, epsilon: float) -> CellKey:
    """Voxel index of a point: floor((p - origin) / epsilon) per axis.

    Pure floor semantics; a point exactly on a cell's upper face belongs
    to the next cell.
    """
    if not (np.isfinite(epsilon) and epsilon > 0):
        raise InvalidInputError(f"epsilon must be > 0, got {epsilon}")
    p = as_point(p)
    origin = as_point(origin)
    idx = np.floor((p - origin) / epsilon).astype(np.int64)
    return (int(idx[0]), int(idx[1]), int(idx[2]))


def cell_keys_of(points: np.ndarray, origin: np.ndarray, epsilon: float) -> np.ndarray:
    """Vectorized cell_key_of: (N, 3) points -> (N, 3) int64 indices."""
    if not (np.isfinite(epsilon) and epsilon > 0):
        raise InvalidInputError(f"epsilon must be > 0, got {epsilon}")
    return np.floor((points - origin) / epsilon).astype(np.int64)


@dataclass(frozen=True)
class CellSet:
    """Set of voxel indices occupied by a cloud at resolution epsilon.

    origin/epsilon are stored so membership questions against other
    clouds stay on the same grid.
    """

    cells: frozenset
    origin: tuple[float, float, float]
    epsilon: float

    def __len__(self) -> int:
        return len(self.cells)

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "origin": list(self.origin),
            "count": len(self.cells),
            "cells": sorted(self.cells),
        }


@dataclass(frozen=True)
class RegionPartition:
    """Assignment of reference/candidate point indices to cubic regions.

    regions maps a region key to (ref_indices, cand_indices) index arrays
    into the two source clouds. Regions empty in both clouds are absent.
    """

    region_size: float
    origin: tuple[float, float, float]
    regions: dict

    def sorted_keys(self) -> list[CellKey]:
        return sorted(self.regions)


@dataclass(frozen=True)
class RegionMetrics:
    """Per-region scores; qr/qa are None where the region does not qualify."""

    key: CellKey
    ref_count: int
    cand_count: int
    qr: Optional[float] = None
    qr_raw: Optional[float] = None
    qa: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "key": list(self.key),
            "ref_count": self.ref_count,
            "cand_count": self.cand_count,
            "qr": self.qr,
            "qr_raw": self.qr_raw,
            "qa": self.qa,
        }


@dataclass(frozen=True)
class CloudStats:
    count: int
    aabb: Aabb

    def to_dict(self) -> dict:
        return {"count": self.count, "aabb": self.aabb.to_dict()}


@dataclass(frozen=True)
class QualityReport:
    """Overall quality scores plus the per-region breakdown.

    qr: resolution, qa: accuracy, qc: coverage, qt: artifact score.
    All four lie in [0, 1] when clamp_scores is enabled; qr_raw carries
    the unclamped mean for debugging.
    """

    qr: float
    qa: float
    qc: float
    qt: float
    qr_raw: float
    per_region: tuple
    config: MetricConfig
    ref_stats: CloudStats
    cand_stats: CloudStats
    baselines: Optional[dict] = None

    def scores(self) -> dict:
        return {"qr": self.qr, "qa": self.qa, "qc": self.qc, "qt": self.qt}

    def to_dict(self, precision: Optional[int] = None) -> dict:
        """Plain-dict form; precision rounds floats for display output."""

        def r(x):
            if x is None:
                return None
            return round(float(x), precision) if precision is not None else float(x)

        d = {
            "qr": r(self.qr),
            "qa": r(self.qa),
            "qc": r(self.qc),
            "qt": r(self.qt),
            "qr_raw": r(self.qr_raw),
            "config": self.config.to_dict(),
            "ref_stats": self.ref_stats.to_dict(),
            "cand_stats": self.cand_stats.to_dict(),
            "per_region": [
                {
                    "key": list(m.key),
                    "ref_count": m.ref_count,
                    "cand_count": m.cand_count,
                    "qr": r(m.qr),
                    "qr_raw": r(m.qr_raw),
                    "qa": r(m.qa),
                }
                for m in self.per_region
            ],
        }
        if self.baselines is not None:
            d["baselines"] = {k: r(v) for k, v in self.baselines.items()}
        return d


@dataclass(frozen=True)
class AnomalyReport:
    """Voxel-level change between a reference map and a frame.

    missing_cells: occupied by the reference only; artifact_cells:
    occupied by the frame only. change_fraction is the symmetric
    difference over the union of occupied cells.
    """

    missing_cells: CellSet
    artifact_cells: CellSet
    change_fraction: float

    def to_dict(self) -> dict:
        return {
            "epsilon": self.missing_cells.epsilon,
            "origin": list(self.missing_cells.origin),
            "change_fraction": self.change_fraction,
            "missing_count": len(self.missing_cells),
            "artifact_count": len(self.artifact_cells),
            "missing_cells": sorted(self.missing_cells.cells),
            "artifact_cells": sorted(self.artifact_cells.cells),
        }
