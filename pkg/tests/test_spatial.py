import numpy as np
import pytest

from pcqa import (
    DegenerateInputError,
    EmptyCloudError,
    PointCloud,
    build_nn_index,
    mean_nn_distance,
    nearest_distance,
    partition_regions,
    voxelize,
)

from conftest import grid_cloud, random_cloud
from oracles import mean_nn_bruteforce, nn_distance_bruteforce, voxel_cells_bruteforce


class TestNNIndex:
    def test_single_point(self):
        idx = build_nn_index([[1.0, 2.0, 3.0]])
        assert nearest_distance(idx, (1, 2, 3)) == 0.0
        assert nearest_distance(idx, (4, 6, 3)) == pytest.approx(5.0, abs=0)

    def test_unit_cube_corner(self):
        corners = [[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)]
        idx = build_nn_index(corners)
        assert nearest_distance(idx, (0.1, 0, 0)) == pytest.approx(0.1, abs=1e-15)

    def test_345_triangle(self):
        idx = build_nn_index([[0.0, 0.0, 0.0]])
        assert nearest_distance(idx, (3, 4, 0)) == 5.0

    def test_self_exclusion(self):
        idx = build_nn_index([[0, 0, 0], [1, 0, 0]])
        assert nearest_distance(idx, (0, 0, 0), exclude_identical_index=0) == 1.0

    def test_exclusion_on_singleton_rejected(self):
        idx = build_nn_index([[0, 0, 0]])
        with pytest.raises(DegenerateInputError):
            nearest_distance(idx, (0, 0, 0), exclude_identical_index=0)

    def test_empty_rejected(self):
        with pytest.raises(EmptyCloudError):
            build_nn_index(np.empty((0, 3)))

    def test_matches_bruteforce_on_random_cloud(self):
        cloud = random_cloud(500, seed=10)
        queries = random_cloud(80, seed=11)
        idx = build_nn_index(cloud)
        for q in queries.points:
            got = nearest_distance(idx, q)
            want = nn_distance_bruteforce(q, cloud.points)
            assert got == pytest.approx(want, abs=1e-12)

    def test_exclusion_matches_bruteforce(self):
        cloud = random_cloud(120, seed=12)
        idx = build_nn_index(cloud)
        for i in range(len(cloud)):
            got = nearest_distance(idx, cloud.points[i], exclude_identical_index=i)
            want = nn_distance_bruteforce(cloud.points[i], cloud.points, exclude_index=i)
            assert got == pytest.approx(want, abs=1e-12)


class TestMeanNNDistance:
    def test_collinear_hand_computation(self):
        pts = [[0, 0, 0], [1, 0, 0], [3, 0, 0]]
        assert mean_nn_distance(pts) == pytest.approx((1 + 1 + 2) / 3, abs=1e-15)

    def test_regular_grid_equals_spacing(self):
        cloud = grid_cloud(5, 5, 5, spacing=0.25)
        assert mean_nn_distance(cloud) == pytest.approx(0.25, abs=1e-12)

    def test_matches_bruteforce(self):
        cloud = random_cloud(200, seed=13)
        assert mean_nn_distance(cloud) == pytest.approx(
            mean_nn_bruteforce(cloud.points), abs=1e-12
        )

    def test_duplicates_contribute_zero(self):
        pts = [[0, 0, 0], [0, 0, 0], [5, 0, 0]]
        assert mean_nn_distance(pts) == pytest.approx(5.0 / 3.0, abs=1e-15)

    def test_needs_two_points(self):
        with pytest.raises(DegenerateInputError):
            mean_nn_distance([[0, 0, 0]])


class TestVoxelize:
    def test_same_cell_collapses(self):
        cs = voxelize([[0.01, 0.01, 0.01], [0.02, 0.03, 0.04]], 0.1, (0, 0, 0))
        assert len(cs) == 1

    def test_grid_1000_cells(self):
        cloud = grid_cloud(10, 10, 10, spacing=0.1)
        cs = voxelize(cloud, 0.1, cloud.points.min(axis=0))
        assert len(cs) == 1000

    def test_matches_bruteforce(self):
        cloud = random_cloud(800, seed=14)
        origin = cloud.points.min(axis=0)
        cs = voxelize(cloud, 0.21, origin)
        assert cs.cells == frozenset(voxel_cells_bruteforce(cloud.points, origin, 0.21))

    def test_duplication_idempotent(self):
        cloud = random_cloud(100, seed=15)
        doubled = np.vstack([cloud.points, cloud.points[::3]])
        a = voxelize(cloud, 0.3, (0, 0, 0))
        b = voxelize(doubled, 0.3, (0, 0, 0))
        assert a.cells == b.cells

    def test_empty_rejected(self):
        with pytest.raises(EmptyCloudError):
            voxelize(np.empty((0, 3)), 0.1, (0, 0, 0))


class TestPartitionRegions:
    def test_single_region(self):
        ref = random_cloud(50, seed=16, high=0.5)
        cand = random_cloud(30, seed=17, high=0.5)
        part = partition_regions(ref, cand, region_size=1.0)
        assert len(part.regions) == 1
        ((ref_idx, cand_idx),) = part.regions.values()
        assert sorted(ref_idx.tolist()) == list(range(50))
        assert sorted(cand_idx.tolist()) == list(range(30))

    def test_disjoint_regions(self):
        ref = PointCloud([[0.05, 0.1, 0.1], [0.06, 0.1, 0.1]])
        cand = PointCloud([[1.5, 0.1, 0.1]])
        part = partition_regions(ref, cand, region_size=1.0)
        assert len(part.regions) == 2
        ref_only = part.regions[(0, 0, 0)]
        cand_only = part.regions[(1, 0, 0)]
        assert len(ref_only[0]) == 2 and len(ref_only[1]) == 0
        assert len(cand_only[0]) == 0 and len(cand_only[1]) == 1

    def test_every_index_exactly_once(self):
        ref = random_cloud(700, seed=18)
        cand = random_cloud(450, seed=19)
        part = partition_regions(ref, cand, region_size=0.9)
        all_ref = np.concatenate([r for r, _ in part.regions.values()])
        all_cand = np.concatenate([c for _, c in part.regions.values()])
        assert sorted(all_ref.tolist()) == list(range(700))
        assert sorted(all_cand.tolist()) == list(range(450))

    def test_keys_match_cell_arithmetic(self):
        ref = random_cloud(200, seed=20)
        cand = random_cloud(200, seed=21)
        part = partition_regions(ref, cand, region_size=1.3)
        origin = np.asarray(part.origin)
        want = voxel_cells_bruteforce(
            np.vstack([ref.points, cand.points]), origin, 1.3
        )
        assert set(part.regions) == want

    def test_order_independent(self):
        ref = random_cloud(300, seed=22)
        cand = random_cloud(300, seed=23)
        part1 = partition_regions(ref, cand, region_size=1.0)
        shuffled = PointCloud(ref.points[::-1].copy(), label=ref.label)
        part2 = partition_regions(shuffled, cand, region_size=1.0)
        assert set(part1.regions) == set(part2.regions)
        for key in part1.regions:
            # same physical points land in the same region either way
            a = ref.points[part1.regions[key][0]]
            b = shuffled.points[part2.regions[key][0]]
            assert {tuple(p) for p in a.tolist()} == {tuple(p) for p in b.tolist()}
