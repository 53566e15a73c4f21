"""Deterministic data-parallel region execution and the runtime benchmark.

All concurrency in the package lives here: a thread pool over regions
with immutable shared inputs. Results are always gathered in sorted
region-key order, so scores are bit-identical for any worker count;
kd-tree construction and queries release the GIL, which is where the
actual parallelism comes from.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import ConfigError, RegionTaskError
from .model import PointCloud, RegionPartition


def run_region_tasks(partition: RegionPartition, task: Callable, workers: int) -> list:
    """Apply a pure per-region task, returning results in sorted-key order.

    task(key, ref_indices, cand_indices) must not touch shared mutable
    state. Failures are collected across all regions and raised together,
    naming the offending region keys.
    """
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    keys = partition.sorted_keys()
    items = [(k, *partition.regions[k]) for k in keys]

    if workers == 1:
        results = []
        failures = []
        for key, ref_idx, cand_idx in items:
            try:
                results.append(task(key, ref_idx, cand_idx))
            except Exception as exc:
                failures.append((key, exc))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(task, key, r, c) for key, r, c in items]
        results = []
        failures = []
        for (key, _, _), fut in zip(items, futures):
            exc = fut.exception()
            if exc is not None:
                failures.append((key, exc))
            else:
                results.append(fut.result())
    if failures:
        detail = "; ".join(f"region {k}: {e}" for k, e in failures)
        raise RegionTaskError(f"{len(failures)} region task(s) failed: {detail}")
    return results


@dataclass(frozen=True)
class BenchRecord:
    """One timed metric run; seconds is the median of the timed repeats."""

    metric: str
    n_ref: int
    n_cand: int
    keep_fraction: float
    region_size: float
    seconds: Optional[float]
    workers: int
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "n_ref": self.n_ref,
            "n_cand": self.n_cand,
            "keep_fraction": self.keep_fraction,
            "region_size": self.region_size,
            "seconds": self.seconds,
            "workers": self.workers,
            "error": self.error,
        }


def _median(values: list[float]) -> float:
    values = sorted(values)
    n = len(values)
    mid = n // 2
    return values[mid] if n % 2 else 0.5 * (values[mid - 1] + values[mid])


def _time_call(fn, repeats: int = 3) -> tuple[float, object]:
    """One untimed warmup, then the median wall time of `repeats` runs."""
    result = fn()
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return _median(times), result


def benchmark(
    ref: PointCloud,
    cand: PointCloud,
    resolutions: list[float],
    region_sizes: list[float],
    config,
    workers: int = 1,
    seed: int = 0,
    repeats: int = 3,
) -> list[BenchRecord]:
    """Time the quality pipeline against chamfer and hausdorff.

    For every (keep fraction, region size) cell, both clouds are
    downsampled to the keep fraction and each metric is timed on the
    identical downsampled pair (one warmup, then the median of
    `repeats` runs). File I/O is excluded; partitioning and index
    construction are part of the timed quality evaluation, since that
    is the cost a caller actually pays.

    A metric failure in one cell is recorded on its BenchRecord and
    does not abort the remaining cells.
    """
    from .baselines import chamfer_distance, hausdorff_distance
    from .degrade import downsample_uniform
    from .model import MetricConfig
    from .quality import evaluate

    if not resolutions or not region_sizes:
        raise ConfigError("benchmark needs at least one resolution and one region size")

    records = []
    for keep in resolutions:
        ref_k = downsample_uniform(ref, keep, seed=seed)
        cand_k = downsample_uniform(cand, keep, seed=seed + 1)
        for r in region_sizes:
            cell_cfg = MetricConfig(
                epsilon=config.epsilon,
                region_size=r,
                clamp_scores=config.clamp_scores,
            )
            runs = [
                ("quality", lambda: evaluate(ref_k, cand_k, cell_cfg, workers=workers)),
                ("chamfer", lambda: chamfer_distance(ref_k, cand_k)),
                ("hausdorff", lambda: hausdorff_distance(ref_k, cand_k)),
            ]
            for name, fn in runs:
                seconds = None
                error = None
                try:
                    seconds, _ = _time_call(fn, repeats=repeats)
                except Exception as exc:
                    error = f"{type(exc).__name__}: {exc}"
                records.append(
                    BenchRecord(
                        metric=name,
                        n_ref=len(ref_k),
                        n_cand=len(cand_k),
                        keep_fraction=float(keep),
                        region_size=float(r),
                        seconds=seconds,
                        workers=workers,
                        error=error,
                    )
                )
    return records


def loglog_slope(sizes: list[float], times: list[float]) -> float:
    """Least-squares slope of log(time) against log(size)."""
    if len(sizes) != len(times) or len(sizes) < 2:
        raise ConfigError("slope fit needs >= 2 (size, time) pairs")
    xs = [math.log(s) for s in sizes]
    ys = [math.log(t) for t in times]
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    num = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    den = sum((x - mx) ** 2 for x in xs)
    return num / den
