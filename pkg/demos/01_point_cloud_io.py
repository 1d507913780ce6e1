"""Frames, file round-trips, and voxel downsampling."""

import tempfile
from pathlib import Path

import numpy as np

from eotrack.pointcloud import PointCloudFrame, load_frame, save_frame, voxel_downsample

rng = np.random.default_rng(0)
frame = PointCloudFrame(timestamp=0.0, points=rng.uniform(-1, 1, size=(5000, 3)))
print(f"frame with {len(frame)} points, bbox min {frame.points.min(axis=0).round(2)}")

with tempfile.TemporaryDirectory() as tmp:
    for fmt, ext in (("pcd_ascii", "pcd"), ("ply_ascii", "ply"), ("csv", "csv")):
        path = Path(tmp) / f"cloud.{ext}"
        save_frame(frame, path, fmt)
        back = load_frame(path, fmt)
        err = np.abs(back.points - frame.points).max()
        print(f"{fmt:<10} round trip: {len(back)} points, max coordinate error {err:.2e} m")

for cell in (0.05, 0.1, 0.25):
    down = voxel_downsample(frame, cell)
    print(f"voxel {cell:0.2f} m: {len(frame)} -> {len(down)} points")
