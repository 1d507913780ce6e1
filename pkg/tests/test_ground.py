import math

import numpy as np
import pytest

from eotrack.ground import (
    InsufficientInliersError,
    PlaneModel,
    RansacConfig,
    TooFewPointsError,
    normalize_plane,
    plane_distances,
    point_plane_distance,
    preselect_near_plane,
    ransac_plane,
    ransac_plane_with_stats,
    remove_ground_points,
)
from eotrack.pointcloud import PointCloudFrame

LIDAR_PRIOR = PlaneModel(0.0, 0.0, 1.0, 1.0)


def make_noisy_plane_cloud(rng, n_plane, noise, n_outliers, normal, d):
    """Synthetic oracle cloud: points on a*x+b*y+c*z+d=0 plus outliers."""
    normal = np.asarray(normal, dtype=np.float64)
    normal = normal / np.linalg.norm(normal)
    # two in-plane directions
    helper = np.array([1.0, 0.0, 0.0]) if abs(normal[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = helper - (helper @ normal) * normal
    u /= np.linalg.norm(u)
    v = np.cross(normal, u)
    coords = rng.uniform(-3, 3, size=(n_plane, 2))
    base = -d * normal
    pts = base + coords[:, :1] * u + coords[:, 1:] * v
    pts += rng.normal(0, noise, size=(n_plane, 1)) * normal
    outliers = rng.uniform(-3, 3, size=(n_outliers, 3))
    return np.concatenate([pts, outliers])


class TestDistances:
    def test_point_on_plane(self):
        assert point_plane_distance((0, 0, -1), LIDAR_PRIOR) == 0.0

    def test_unit_offset(self):
        assert point_plane_distance((5, 7, 0), LIDAR_PRIOR) == 1.0

    def test_diagonal_plane_hand_value(self):
        plane = normalize_plane(PlaneModel(1.0, 1.0, 1.0, 0.0))
        assert point_plane_distance((1, 1, 1), plane) == pytest.approx(math.sqrt(3), abs=1e-12)


class TestNormalize:
    def test_unit_norm(self):
        p = normalize_plane(PlaneModel(0.0, 0.0, 2.0, 4.0))
        assert np.linalg.norm(p.normal) == pytest.approx(1.0)
        assert p.d == pytest.approx(2.0)

    @pytest.mark.parametrize(
        "coeffs,expected_sign_axis",
        [
            ((0, 0, -1, 5), 2),   # c forced positive
            ((0, -2, 0, 1), 1),   # c == 0: b forced positive
            ((-3, 0, 0, 1), 0),   # b == c == 0: a forced positive
        ],
    )
    def test_sign_canonicalization(self, coeffs, expected_sign_axis):
        p = normalize_plane(PlaneModel(*coeffs))
        assert p.as_array()[expected_sign_axis] > 0

    def test_zero_normal_rejected(self):
        with pytest.raises(ValueError):
            normalize_plane(PlaneModel(0, 0, 0, 1))


class TestPreselectAndRemove:
    def test_threshold_boundary_inclusive(self):
        pts = [[0, 0, -0.5], [0, 0, 0.0], [0, 0, 0.5]]  # distances 0.5, 1.0, 1.5
        out = preselect_near_plane(PointCloudFrame(0.0, pts), LIDAR_PRIOR, 1.0)
        assert len(out) == 2

    def test_empty_frame(self):
        out = preselect_near_plane(PointCloudFrame(0.0, np.empty((0, 3))), LIDAR_PRIOR, 1.0)
        assert len(out) == 0

    def test_preselect_matches_brute_force(self):
        rng = np.random.default_rng(5)
        pts = rng.uniform(-3, 3, size=(1000, 3))
        frame = PointCloudFrame(0.0, pts)
        out = preselect_near_plane(frame, LIDAR_PRIOR, 0.7)
        expected = {tuple(p) for p in pts if abs(p[2] + 1.0) <= 0.7}
        assert {tuple(p) for p in out.points} == expected

    def test_remove_ground_boundary_removes_exact(self):
        # margin chosen exactly representable so the boundary case is exact
        pts = [[0, 0, -0.75], [0, 0, -0.25]]  # distances 0.25 (boundary) and 0.75
        out = remove_ground_points(PointCloudFrame(0.0, pts), LIDAR_PRIOR, 0.25)
        assert len(out) == 1
        assert out.points[0, 2] == -0.25

    def test_remove_matches_brute_force(self):
        rng = np.random.default_rng(6)
        pts = rng.uniform(-2, 2, size=(800, 3))
        out = remove_ground_points(PointCloudFrame(0.0, pts), LIDAR_PRIOR, 0.3)
        expected = {tuple(p) for p in pts if abs(p[2] + 1.0) > 0.3}
        assert {tuple(p) for p in out.points} == expected

    def test_partition_is_exact(self):
        rng = np.random.default_rng(7)
        pts = rng.uniform(-2, 2, size=(500, 3))
        frame = PointCloudFrame(0.0, pts)
        kept = preselect_near_plane(frame, LIDAR_PRIOR, 0.4)
        removed = remove_ground_points(frame, LIDAR_PRIOR, 0.4)
        assert len(kept) + len(removed) == len(frame)
        merged = sorted(map(tuple, np.concatenate([kept.points, removed.points])))
        assert merged == sorted(map(tuple, pts))


class TestRansac:
    def test_recovers_noisy_plane(self):
        rng = np.random.default_rng(8)
        pts = make_noisy_plane_cloud(rng, 500, 0.01, 50, (0, 0, 1), 1.0)
        plane = ransac_plane(PointCloudFrame(0.0, pts), RansacConfig(seed=0))
        angle = math.degrees(math.acos(np.clip(plane.normal @ [0, 0, 1], -1, 1)))
        assert angle <= 2.0
        assert abs(plane.d - 1.0) <= 0.02

    def test_three_exact_points(self):
        frame = PointCloudFrame(0.0, [[0, 0, 0], [1, 0, 0], [0, 1, 0]])
        plane = ransac_plane(frame, RansacConfig(min_inliers=3))
        np.testing.assert_allclose(plane.as_array(), [0, 0, 1, 0], atol=1e-12)

    def test_too_few_points(self):
        with pytest.raises(TooFewPointsError):
            ransac_plane(PointCloudFrame(0.0, [[0, 0, 0], [1, 0, 0]]), RansacConfig())

    def test_insufficient_inliers(self):
        rng = np.random.default_rng(9)
        pts = rng.uniform(-5, 5, size=(40, 3))  # diffuse cloud, no 30-point plane
        with pytest.raises(InsufficientInliersError):
            ransac_plane(
                PointCloudFrame(0.0, pts),
                RansacConfig(inlier_threshold=0.001, min_inliers=30, seed=1),
            )

    def test_permutation_invariance(self):
        rng = np.random.default_rng(10)
        pts = make_noisy_plane_cloud(rng, 300, 0.005, 30, (0.1, 0.2, 1.0), 0.5)
        frame = PointCloudFrame(0.0, pts)
        shuffled = PointCloudFrame(0.0, pts[rng.permutation(len(pts))])
        cfg = RansacConfig(seed=3)
        p1 = ransac_plane(frame, cfg)
        p2 = ransac_plane(shuffled, cfg)
        np.testing.assert_array_equal(p1.as_array(), p2.as_array())

    def test_support_not_below_any_hypothesis(self):
        rng = np.random.default_rng(11)
        pts = make_noisy_plane_cloud(rng, 400, 0.01, 80, (0, 0.3, 1.0), 0.8)
        plane, stats = ransac_plane_with_stats(PointCloudFrame(0.0, pts), RansacConfig(seed=4))
        assert stats["support"] >= max(stats["hypothesis_counts"])

    def test_config_validation(self):
        with pytest.raises(ValueError, match="inlier_threshold"):
            RansacConfig(inlier_threshold=0.0)
        with pytest.raises(ValueError, match="min_inliers"):
            RansacConfig(min_inliers=2)
