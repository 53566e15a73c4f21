import numpy as np
import pytest

from pcqa import (
    BijectivityError,
    EmptyCloudError,
    InstanceTooLargeError,
    PointCloud,
    chamfer_distance,
    emd_exact,
    hausdorff_distance,
)

from conftest import random_cloud
from oracles import chamfer_bruteforce, emd_bruteforce, hausdorff_bruteforce


class TestChamfer:
    def test_identity_zero(self, small_cloud):
        assert chamfer_distance(small_cloud, small_cloud) == 0.0

    def test_two_singletons(self):
        a = PointCloud([[0, 0, 0]])
        b = PointCloud([[1, 0, 0]])
        assert chamfer_distance(a, b) == 2.0

    def test_symmetric(self):
        a = random_cloud(60, seed=50)
        b = random_cloud(80, seed=51)
        assert chamfer_distance(a, b) == chamfer_distance(b, a)

    def test_matches_bruteforce(self):
        a = random_cloud(300, seed=52)
        b = random_cloud(280, seed=53)
        assert chamfer_distance(a, b) == pytest.approx(
            chamfer_bruteforce(a.points, b.points), abs=1e-9
        )

    def test_squared_variant(self):
        a = random_cloud(50, seed=54)
        b = random_cloud(40, seed=55)
        assert chamfer_distance(a, b, squared=True) == pytest.approx(
            chamfer_bruteforce(a.points, b.points, squared=True), abs=1e-9
        )

    def test_translation_invariant(self):
        a = random_cloud(64, seed=56)
        b = random_cloud(72, seed=57)
        t = np.array([4.0, -2.5, 8.0])
        moved = chamfer_distance(
            PointCloud(a.points + t), PointCloud(b.points + t)
        )
        assert moved == pytest.approx(chamfer_distance(a, b), abs=1e-9)

    def test_empty_rejected(self):
        with pytest.raises(EmptyCloudError):
            chamfer_distance(np.empty((0, 3)), [[0, 0, 0]])


class TestHausdorff:
    def test_identity_zero(self, small_cloud):
        assert hausdorff_distance(small_cloud, small_cloud) == 0.0

    def test_hand_example(self):
        a = PointCloud([[0, 0, 0], [10, 0, 0]])
        b = PointCloud([[0, 0, 0]])
        assert hausdorff_distance(a, b) == 10.0

    def test_symmetric_and_matches_bruteforce(self):
        a = random_cloud(150, seed=58)
        b = random_cloud(130, seed=59)
        want = hausdorff_bruteforce(a.points, b.points)
        assert hausdorff_distance(a, b) == pytest.approx(want, abs=1e-12)
        assert hausdorff_distance(b, a) == pytest.approx(want, abs=1e-12)

    def test_bounds_directed_nn(self):
        # the symmetrized value dominates every per-point NN distance
        a = random_cloud(90, seed=60)
        b = random_cloud(70, seed=61)
        h = hausdorff_distance(a, b)
        from pcqa import build_nn_index, nearest_distance

        idx_b = build_nn_index(b)
        assert all(nearest_distance(idx_b, p) <= h + 1e-12 for p in a.points)


class TestEmd:
    def test_identical_any_order(self):
        a = random_cloud(40, seed=62)
        shuffled = PointCloud(a.points[::-1].copy())
        assert emd_exact(a, shuffled) == pytest.approx(0.0, abs=1e-12)

    def test_two_point_hand_example(self):
        a = PointCloud([[0, 0, 0], [2, 0, 0]])
        b = PointCloud([[1, 0, 0], [3, 0, 0]])
        assert emd_exact(a, b) == 2.0  # in-order matching: 1 + 1

    def test_size_mismatch_rejected(self):
        with pytest.raises(BijectivityError):
            emd_exact(random_cloud(5, seed=63), random_cloud(6, seed=64))

    def test_cap_enforced(self):
        with pytest.raises(InstanceTooLargeError):
            emd_exact(random_cloud(20, seed=65), random_cloud(20, seed=66), max_points=10)

    @pytest.mark.parametrize("n", [2, 4, 6, 8])
    def test_matches_permutation_oracle(self, n):
        a = random_cloud(n, seed=600 + n)
        b = random_cloud(n, seed=700 + n)
        assert emd_exact(a, b) == pytest.approx(emd_bruteforce(a.points, b.points), abs=1e-9)

    def test_symmetric(self):
        a = random_cloud(7, seed=67)
        b = random_cloud(7, seed=68)
        assert emd_exact(a, b) == pytest.approx(emd_exact(b, a), abs=1e-9)
