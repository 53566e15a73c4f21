import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pcqa import PointCloud


def random_cloud(n, seed, low=0.0, high=5.0, label="cloud"):
    rng = np.random.default_rng(seed)
    return PointCloud(rng.uniform(low, high, (n, 3)), label=label)


def grid_cloud(nx, ny, nz, spacing, label="grid"):
    """Regular grid with coordinates i*spacing; min corner at the origin."""
    xs = np.arange(nx) * spacing
    ys = np.arange(ny) * spacing
    zs = np.arange(nz) * spacing
    pts = np.stack(np.meshgrid(xs, ys, zs, indexing="ij"), axis=-1).reshape(-1, 3)
    return PointCloud(pts, label=label)


@pytest.fixture
def small_cloud():
    return random_cloud(200, seed=42)
