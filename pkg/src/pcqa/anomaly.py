"""Voxel-occupancy change detection between a reference map and frames.

Both clouds are voxelized on a shared grid; cells occupied by only one
of the two are the change. The change fraction uses the union of
occupied cells as denominator, which makes the magnitude symmetric:
swapping reference and frame swaps the missing/artifact roles but not
the fraction.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .errors import ConfigError, EmptyResultError, InvalidInputError
from .model import Aabb, AnomalyReport, CellSet, PointCloud, cell_keys_of
from .spatial import voxelize


def _filter_roi(cloud: PointCloud, roi: Aabb, name: str) -> PointCloud:
    mask = roi.contains(cloud.points)
    if not mask.any():
        raise EmptyResultError(f"ROI filter removed every {name} point")
    return PointCloud(cloud.points[mask], label=cloud.label)


def detect_changes(
    reference: PointCloud,
    frame: PointCloud,
    epsilon: float,
    roi: Optional[Aabb] = None,
) -> AnomalyReport:
    """Localize occupancy changes between a reference map and a frame.

    missing cells are occupied by the reference only, artifact cells by
    the frame only. With an ROI both clouds are hard-cropped to it
    before voxelization.
    """
    if not (np.isfinite(epsilon) and epsilon > 0):
        raise InvalidInputError(f"epsilon must be > 0, got {epsilon}")
    reference.require_points()
    frame.require_points()
    if roi is not None:
        reference = _filter_roi(reference, roi, "reference")
        frame = _filter_roi(frame, roi, "frame")

    origin = np.minimum(reference.points.min(axis=0), frame.points.min(axis=0))
    ref_cells = voxelize(reference.points, epsilon, origin)
    frame_cells = voxelize(frame.points, epsilon, origin)

    missing = ref_cells.cells - frame_cells.cells
    artifacts = frame_cells.cells - ref_cells.cells
    union = ref_cells.cells | frame_cells.cells
    origin_t = tuple(origin.tolist())
    return AnomalyReport(
        missing_cells=CellSet(cells=missing, origin=origin_t, epsilon=float(epsilon)),
        artifact_cells=CellSet(cells=artifacts, origin=origin_t, epsilon=float(epsilon)),
        change_fraction=len(missing | artifacts) / len(union),
    )


def change_mask(report: AnomalyReport, cloud: PointCloud) -> list[bool]:
    """Per-point flags: True where the point's cell changed.

    The cloud is voxelized on the report's own grid, so masks for the
    reference map and for the frame are both meaningful.
    """
    if (
        report.missing_cells.origin != report.artifact_cells.origin
        or report.missing_cells.epsilon != report.artifact_cells.epsilon
    ):
        raise ConfigError("report cell sets disagree on grid origin/epsilon")
    cloud.require_points()
    changed = report.missing_cells.cells | report.artifact_cells.cells
    origin = np.asarray(report.missing_cells.origin, dtype=np.float64)
    keys = cell_keys_of(cloud.points, origin, report.missing_cells.epsilon)
    return [tuple(k) in changed for k in keys.tolist()]
