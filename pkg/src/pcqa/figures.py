"""Matplotlib renderings of reports, written to files next to the CSV/JSON
output. Headless (Agg) so the CLI works without a display."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .model import QualityReport


def render_region_heatmaps(report: QualityReport, path) -> Path:
    """Per-region qr/qa heatmaps projected onto the XY plane.

    Vertical stacks of regions are averaged (ignoring unqualified
    regions) so 3D scenes stay readable in 2D.
    """
    path = Path(path)
    metrics = report.per_region
    keys = np.array([m.key for m in metrics])
    i_lo, j_lo = keys[:, 0].min(), keys[:, 1].min()
    ni = keys[:, 0].max() - i_lo + 1
    nj = keys[:, 1].max() - j_lo + 1

    fig, axes = plt.subplots(1, 2, figsize=(11, 4.5))
    for ax, field, title in ((axes[0], "qr", "resolution"), (axes[1], "qa", "accuracy")):
        acc = np.zeros((ni, nj))
        cnt = np.zeros((ni, nj))
        for m in metrics:
            v = getattr(m, field)
            if v is None:
                continue
            i, j = m.key[0] - i_lo, m.key[1] - j_lo
            acc[i, j] += v
            cnt[i, j] += 1
        grid = np.full((ni, nj), np.nan)
        np.divide(acc, cnt, out=grid, where=cnt > 0)
        im = ax.imshow(grid.T, origin="lower", vmin=0.0, vmax=1.0, cmap="viridis")
        ax.set_title(f"{title} per region (XY, mean over Z)")
        ax.set_xlabel("region i")
        ax.set_ylabel("region j")
        fig.colorbar(im, ax=ax, fraction=0.046)
    fig.suptitle(
        f"qr={report.qr:.3f}  qa={report.qa:.3f}  qc={report.qc:.3f}  qt={report.qt:.3f}"
    )
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def render_bench_plot(records, path) -> Path:
    """Runtime curves: wall seconds vs point count, one line per metric
    and region size, log-log axes."""
    path = Path(path)
    series = {}
    for rec in records:
        if rec.seconds is None:
            continue
        series.setdefault((rec.metric, rec.region_size), []).append(
            (rec.n_ref + rec.n_cand, rec.seconds)
        )
    fig, ax = plt.subplots(figsize=(7, 5))
    for (metric, rsize), pts in sorted(series.items()):
        pts.sort()
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        ax.plot(xs, ys, marker="o", label=f"{metric} (r={rsize:g})")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("total points")
    ax.set_ylabel("wall time [s]")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
