"""The four quality scores and the full evaluation pipeline.

A candidate cloud is compared against a reference along four axes:

* resolution (qr): per region, the ratio of reference to candidate mean
  nearest-neighbor spacing. 1.0 means the candidate resolves the scene
  as finely as the reference.
* accuracy (qa): per region, one minus the normalized sum of candidate
  nearest-neighbor errors, counting only errors within epsilon. Points
  farther than epsilon from any reference point are artifacts and are
  scored by qt instead, not double-penalized here.
* coverage (qc): fraction of reference-occupied cells also occupied by
  the candidate. Computed globally on the full clouds, never averaged
  over regions.
* artifact score (qt): one minus the fraction of candidate-occupied
  cells that the reference does not occupy. Also global.

Resolution and accuracy average over *eligible* regions only: a region
with no candidate presence is a coverage problem, not a resolution or
accuracy one, and scoring it zero here would conflate the dimensions.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .errors import ConfigError, UndefinedMetricError
from .model import (
    CellSet,
    CloudStats,
    MetricConfig,
    PointCloud,
    QualityReport,
    RegionMetrics,
    RegionPartition,
    joint_aabb,
)
from .parallel import run_region_tasks
from .spatial import partition_regions, voxelize


def _region_metrics(
    ref_pts: np.ndarray, cand_pts: np.ndarray, epsilon: float
) -> tuple[Optional[float], Optional[float]]:
    """Raw resolution ratio and accuracy for one region (None = unqualified).

    Resolution needs >= 2 reference points and a candidate presence: a
    single candidate point cannot resolve anything and scores 0, while a
    wholly absent candidate is a coverage problem and leaves the region
    out of the resolution average. A candidate with zero spacing (all
    duplicates) is infinitely dense, so the raw ratio is +inf (clamped
    later). Accuracy needs both sides non-empty: each candidate point
    contributes its nearest-neighbor distance into the region's
    reference when that distance is <= epsilon (farther points are
    artifacts, scored elsewhere), normalized by epsilon times the
    candidate count.
    """
    nr, nc = ref_pts.shape[0], cand_pts.shape[0]
    if nr < 1 or nc < 1:
        return None, None
    ref_tree = cKDTree(ref_pts)

    qr_raw: Optional[float] = None
    if nr >= 2:
        if nc == 1:
            qr_raw = 0.0
        else:
            d_ref = float(np.mean(ref_tree.query(ref_pts, k=2)[0][:, 1]))
            d_cand = float(np.mean(cKDTree(cand_pts).query(cand_pts, k=2)[0][:, 1]))
            if d_cand == 0.0:
                qr_raw = 1.0 if d_ref == 0.0 else float("inf")
            else:
                qr_raw = d_ref / d_cand

    d, _ = ref_tree.query(cand_pts, k=1)
    d = np.atleast_1d(d)
    s = np.where(d <= epsilon, d, 0.0)
    qa = 1.0 - float(np.sum(s)) / (epsilon * nc)
    return qr_raw, qa


def _clamp(value: float, enabled: bool) -> float:
    return min(max(value, 0.0), 1.0) if enabled else value


def _mean_or_undefined(values: list[float], metric: str) -> float:
    if not values:
        raise UndefinedMetricError(f"{metric}: no eligible region")
    return float(np.mean(np.asarray(values, dtype=np.float64)))


def resolution_score(
    partition: RegionPartition,
    ref: PointCloud,
    cand: PointCloud,
    config: MetricConfig,
) -> tuple[float, list[tuple]]:
    """Overall resolution plus (key, qr, qr_raw) per eligible region."""
    per_region = []
    values = []
    for key in partition.sorted_keys():
        ref_idx, cand_idx = partition.regions[key]
        raw, _ = _region_metrics(ref.points[ref_idx], cand.points[cand_idx], config.epsilon)
        if raw is None:
            continue
        qr = _clamp(raw, config.clamp_scores)
        per_region.append((key, qr, raw))
        values.append(qr)
    return _mean_or_undefined(values, "resolution"), per_region


def accuracy_score(
    partition: RegionPartition,
    ref: PointCloud,
    cand: PointCloud,
    config: MetricConfig,
) -> tuple[float, list[tuple]]:
    """Overall accuracy plus (key, qa) per eligible region."""
    per_region = []
    values = []
    for key in partition.sorted_keys():
        ref_idx, cand_idx = partition.regions[key]
        _, qa = _region_metrics(ref.points[ref_idx], cand.points[cand_idx], config.epsilon)
        if qa is None:
            continue
        per_region.append((key, qa))
        values.append(qa)
    return _mean_or_undefined(values, "accuracy"), per_region


def coverage_score(ref_cells: CellSet, cand_cells: CellSet) -> float:
    """|reference cells also in candidate| / |reference cells|."""
    _check_same_grid(ref_cells, cand_cells)
    if len(ref_cells) == 0:
        raise UndefinedMetricError("coverage: reference occupies no cells")
    return len(ref_cells.cells & cand_cells.cells) / len(ref_cells.cells)


def artifact_score(ref_cells: CellSet, cand_cells: CellSet) -> float:
    """1 - |candidate cells outside the reference| / |candidate cells|."""
    _check_same_grid(ref_cells, cand_cells)
    if len(cand_cells) == 0:
        raise UndefinedMetricError("artifact score: candidate occupies no cells")
    return 1.0 - len(cand_cells.cells - ref_cells.cells) / len(cand_cells.cells)


def _check_same_grid(a: CellSet, b: CellSet) -> None:
    if a.origin != b.origin or a.epsilon != b.epsilon:
        raise ConfigError(
            "cell sets built on different grids: "
            f"({a.origin}, eps={a.epsilon}) vs ({b.origin}, eps={b.epsilon})"
        )


def evaluate(
    ref: PointCloud,
    cand: PointCloud,
    config: MetricConfig,
    workers: int = 1,
) -> QualityReport:
    """Full four-score comparison of a candidate cloud against a reference.

    Deterministic for fixed inputs: per-region results are reduced in
    sorted region-key order, so the report is bit-identical for any
    worker count.
    """
    ref.require_points()
    cand.require_points()
    origin = joint_aabb(ref, cand).min_corner

    partition = partition_regions(ref, cand, config.region_size)

    ref_points = ref.points
    cand_points = cand.points
    epsilon = config.epsilon

    def task(key, ref_idx, cand_idx):
        rp = ref_points[ref_idx]
        cp = cand_points[cand_idx]
        raw, qa = _region_metrics(rp, cp, epsilon)
        return RegionMetrics(
            key=key,
            ref_count=int(ref_idx.shape[0]),
            cand_count=int(cand_idx.shape[0]),
            qr=None if raw is None else _clamp(raw, config.clamp_scores),
            qr_raw=raw,
            qa=qa,
        )

    per_region = run_region_tasks(partition, task, workers)

    qr_values = [m.qr for m in per_region if m.qr is not None]
    raw_values = [m.qr_raw for m in per_region if m.qr_raw is not None]
    qa_values = [m.qa for m in per_region if m.qa is not None]

    qr = _mean_or_undefined(qr_values, "resolution")
    qr_raw = float(np.mean(np.asarray(raw_values, dtype=np.float64)))
    qa = _mean_or_undefined(qa_values, "accuracy")

    ref_cells = voxelize(ref_points, epsilon, origin)
    cand_cells = voxelize(cand_points, epsilon, origin)
    qc = coverage_score(ref_cells, cand_cells)
    qt = artifact_score(ref_cells, cand_cells)

    return QualityReport(
        qr=qr,
        qa=qa,
        qc=qc,
        qt=qt,
        qr_raw=qr_raw,
        per_region=tuple(per_region),
        config=config,
        ref_stats=CloudStats(count=len(ref), aabb=ref.aabb()),
        cand_stats=CloudStats(count=len(cand), aabb=cand.aabb()),
    )


def with_baselines(report: QualityReport, baselines: dict) -> QualityReport:
    """Copy of the report with baseline distances attached."""
    return QualityReport(
        qr=report.qr,
        qa=report.qa,
        qc=report.qc,
        qt=report.qt,
        qr_raw=report.qr_raw,
        per_region=report.per_region,
        config=report.config,
        ref_stats=report.ref_stats,
        cand_stats=report.cand_stats,
        baselines=baselines,
    )
