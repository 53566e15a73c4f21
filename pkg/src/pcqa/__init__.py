"""Multi-dimensional point cloud quality assessment.

Compares a candidate point cloud against a reference along four
normalized axes (resolution, accuracy, coverage, artifact score),
with baseline distances (Chamfer, Hausdorff, exact EMD), deterministic
degradation generators, voxel change detection and a benchmark harness.
"""

from .anomaly import change_mask, detect_changes
from .baselines import chamfer_distance, emd_exact, hausdorff_distance
from .cloud_io import CloudFormat, infer_format, read_cloud, write_cloud
from .degrade import add_gaussian_noise, crop_axis, downsample_uniform, shift
from .errors import (
    BijectivityError,
    ConfigError,
    DegenerateInputError,
    EmptyCloudError,
    EmptyResultError,
    InstanceTooLargeError,
    InvalidInputError,
    ParseError,
    PcqaError,
    RegionTaskError,
    UndefinedMetricError,
)
from .model import (
    Aabb,
    AnomalyReport,
    CellSet,
    CloudStats,
    MetricConfig,
    PointCloud,
    QualityReport,
    RegionMetrics,
    RegionPartition,
    cell_key_of,
    joint_aabb,
)
from .parallel import BenchRecord, benchmark, loglog_slope, run_region_tasks
from .quality import (
    accuracy_score,
    artifact_score,
    coverage_score,
    evaluate,
    resolution_score,
    with_baselines,
)
from .spatial import (
    NNIndex,
    build_nn_index,
    mean_nn_distance,
    nearest_distance,
    partition_regions,
    voxelize,
)

__version__ = "0.1.0"

__all__ = [
    "Aabb",
    "AnomalyReport",
    "BenchRecord",
    "BijectivityError",
    "CellSet",
    "CloudFormat",
    "CloudStats",
    "ConfigError",
    "DegenerateInputError",
    "EmptyCloudError",
    "EmptyResultError",
    "InstanceTooLargeError",
    "InvalidInputError",
    "MetricConfig",
    "NNIndex",
    "ParseError",
    "PcqaError",
    "PointCloud",
    "QualityReport",
    "RegionMetrics",
    "RegionPartition",
    "RegionTaskError",
    "UndefinedMetricError",
    "accuracy_score",
    "add_gaussian_noise",
    "artifact_score",
    "benchmark",
    "build_nn_index",
    "cell_key_of",
    "chamfer_distance",
    "change_mask",
    "coverage_score",
    "crop_axis",
    "detect_changes",
    "downsample_uniform",
    "emd_exact",
    "evaluate",
    "hausdorff_distance",
    "infer_format",
    "joint_aabb",
    "loglog_slope",
    "mean_nn_distance",
    "nearest_distance",
    "partition_regions",
    "read_cloud",
    "resolution_score",
    "run_region_tasks",
    "shift",
    "voxelize",
    "with_baselines",
    "write_cloud",
]
