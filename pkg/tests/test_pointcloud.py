import numpy as np
import pytest

from eotrack.pointcloud import (
    FormatError,
    PointCloudFrame,
    frame_filename,
    load_frame,
    load_frame_dir,
    save_frame,
    voxel_downsample,
)


def brute_force_voxel_count(points, cell):
    """Independent oracle: count occupied voxels of the origin-anchored grid."""
    return len({tuple(np.floor(p / cell).astype(int)) for p in points})


class TestFrame:
    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            PointCloudFrame(0.0, [[0.0, 0.0, np.nan]])

    def test_points_read_only(self):
        f = PointCloudFrame(0.0, [[1.0, 2.0, 3.0]])
        with pytest.raises(ValueError):
            f.points[0, 0] = 9.0

    def test_empty_allowed(self):
        assert len(PointCloudFrame(0.0, np.empty((0, 3)))) == 0


class TestLoadSave:
    def test_pcd_ascii_three_points(self, tmp_path):
        p = tmp_path / "a.pcd"
        p.write_text(
            "VERSION 0.7\nFIELDS x y z\nSIZE 4 4 4\nTYPE F F F\nCOUNT 1 1 1\n"
            "WIDTH 3\nHEIGHT 1\nVIEWPOINT 0 0 0 1 0 0 0\nPOINTS 3\nDATA ascii\n"
            "0 0 0\n1 2 3\n-1 -2 -3\n"
        )
        f = load_frame(p, "pcd_ascii")
        assert len(f) == 3
        np.testing.assert_allclose(f.points[1], [1, 2, 3])

    def test_csv_nan_dropped_with_warning(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("x,y,z\n0.0,0.0,0.0\n1.0,2.0,nan\n")
        with pytest.warns(UserWarning, match="dropped 1 non-finite"):
            f = load_frame(p, "csv")
        assert len(f) == 1

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_frame(tmp_path / "missing.pcd", "pcd_ascii")

    def test_binary_pcd_rejected(self, tmp_path):
        p = tmp_path / "a.pcd"
        p.write_text("VERSION 0.7\nFIELDS x y z\nPOINTS 0\nDATA binary\n")
        with pytest.raises(FormatError, match="binary"):
            load_frame(p, "pcd_ascii")

    def test_binary_ply_rejected(self, tmp_path):
        p = tmp_path / "a.ply"
        p.write_text(
            "ply\nformat binary_little_endian 1.0\nelement vertex 0\n"
            "property float x\nproperty float y\nproperty float z\nend_header\n"
        )
        with pytest.raises(FormatError):
            load_frame(p, "ply_ascii")

    def test_malformed_header(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(FormatError, match="header"):
            load_frame(p, "csv")

    def test_empty_frame_roundtrip(self, tmp_path):
        for fmt, name in [("pcd_ascii", "e.pcd"), ("ply_ascii", "e.ply"), ("csv", "e.csv")]:
            save_frame(PointCloudFrame(0.0, np.empty((0, 3))), tmp_path / name, fmt)
            assert len(load_frame(tmp_path / name, fmt)) == 0

    def test_csv_roundtrip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        pts = rng.uniform(-50, 50, size=(200, 3))
        f = PointCloudFrame(0.0, pts)
        save_frame(f, tmp_path / "r.csv", "csv")
        back = load_frame(tmp_path / "r.csv", "csv")
        assert np.array_equal(back.points, f.points)

    @pytest.mark.parametrize("fmt,name", [("pcd_ascii", "r.pcd"), ("ply_ascii", "r.ply")])
    def test_ascii_roundtrip_1e6(self, tmp_path, fmt, name):
        rng = np.random.default_rng(1)
        pts = rng.uniform(-10, 10, size=(1000, 3))
        save_frame(PointCloudFrame(0.0, pts), tmp_path / name, fmt)
        back = load_frame(tmp_path / name, fmt)
        assert np.abs(back.points - pts).max() <= 1e-6

    def test_ply_roundtrip_multiset(self, tmp_path):
        # duplicates preserved, order irrelevant
        pts = np.array([[0.25, 0.5, 0.75]] * 3 + [[1.0, 2.0, 3.0]])
        save_frame(PointCloudFrame(0.0, pts), tmp_path / "d.ply", "ply_ascii")
        back = load_frame(tmp_path / "d.ply", "ply_ascii")
        assert sorted(map(tuple, back.points)) == sorted(map(tuple, pts))


class TestVoxelDownsample:
    def test_same_voxel_centroid(self):
        f = PointCloudFrame(0.0, [[0.0475, 0.05, 0.05], [0.0525, 0.05, 0.05]])
        out = voxel_downsample(f, 0.1)
        assert len(out) == 1
        np.testing.assert_allclose(out.points[0], [0.05, 0.05, 0.05])

    def test_distinct_voxels_untouched(self):
        f = PointCloudFrame(0.0, [[0.05, 0.0, 0.0], [1.05, 0.0, 0.0]])
        out = voxel_downsample(f, 0.1)
        assert len(out) == 2

    def test_non_positive_cell(self):
        with pytest.raises(ValueError):
            voxel_downsample(PointCloudFrame(0.0, [[0, 0, 0]]), 0.0)

    def test_occupancy_matches_brute_force(self):
        rng = np.random.default_rng(2)
        pts = rng.uniform(0, 1, size=(10_000, 3))
        out = voxel_downsample(PointCloudFrame(0.0, pts), 0.1)
        assert len(out) <= 1000
        assert len(out) == brute_force_voxel_count(pts, 0.1)

    def test_count_idempotent(self):
        rng = np.random.default_rng(3)
        pts = rng.normal(0, 2, size=(5000, 3))
        once = voxel_downsample(PointCloudFrame(0.0, pts), 0.25)
        twice = voxel_downsample(once, 0.25)
        assert len(twice) == len(once)

    def test_output_inside_input_bbox(self):
        rng = np.random.default_rng(4)
        pts = rng.normal(0, 1, size=(2000, 3))
        out = voxel_downsample(PointCloudFrame(0.0, pts), 0.3)
        assert (out.points >= pts.min(axis=0) - 1e-12).all()
        assert (out.points <= pts.max(axis=0) + 1e-12).all()

    def test_negative_coordinates(self):
        f = PointCloudFrame(0.0, [[-0.05, -0.05, -0.05], [-0.02, -0.02, -0.02]])
        assert len(voxel_downsample(f, 0.1)) == 1


class TestFrameDir:
    def test_sorted_by_index_with_timestamps(self, tmp_path):
        frames = [
            PointCloudFrame(0.5, [[1.0, 0.0, 0.0]]),
            PointCloudFrame(1.0, [[2.0, 0.0, 0.0]]),
            PointCloudFrame(1.5, [[3.0, 0.0, 0.0]]),
        ]
        # write out of order on purpose
        for i in (2, 0, 1):
            save_frame(frames[i], tmp_path / frame_filename(i, frames[i].timestamp), "pcd_ascii")
        back = load_frame_dir(tmp_path)
        assert [len(f) for f in back] == [1, 1, 1]
        assert [f.points[0, 0] for f in back] == [1.0, 2.0, 3.0]
        assert [f.timestamp for f in back] == [0.5, 1.0, 1.5]

    def test_non_matching_files_ignored(self, tmp_path):
        (tmp_path / "notes.txt").write_text("hello")
        save_frame(PointCloudFrame(0.25, [[0, 0, 0]]), tmp_path / frame_filename(0, 0.25), "pcd_ascii")
        assert len(load_frame_dir(tmp_path)) == 1
