"""Ground-plane initialization on a simulated LiDAR frame.

Replays the initialization phase: preselect points near the prior plane,
voxel-downsample to equalize density, fit with RANSAC, then strip ground
points from a frame using the fitted plane.
"""

import numpy as np

from eotrack.ground import PlaneModel, RansacConfig, preselect_near_plane, ransac_plane, remove_ground_points
from eotrack.pointcloud import voxel_downsample
from eotrack.sim import generate_scenario, lidar_profile, straight_scenario

frames, gt = generate_scenario(straight_scenario(duration=1.0), lidar_profile())
frame = frames[0]
print(f"frame 0: {len(frame)} points")

prior = PlaneModel(0.0, 0.0, 1.0, 1.0)  # sensor mounted ~1 m above the floor
near = preselect_near_plane(frame, prior, margin=1.0)
down = voxel_downsample(near, cell=0.1)
print(f"preselected {len(near)} points within 1 m of the prior, {len(down)} after downsampling")

plane = ransac_plane(down, RansacConfig(inlier_threshold=0.02, max_iterations=100, min_inliers=10, seed=0))
print(f"fitted plane: {np.round(plane.as_array(), 5)} (true plane is z = -1)")

angle = np.degrees(np.arccos(abs(plane.normal @ [0, 0, 1])))
print(f"normal error {angle:.3f} deg, offset error {abs(plane.d - 1.0) * 1000:.2f} mm")

objects = remove_ground_points(frame, plane, margin=0.02)
print(f"ground removal keeps {len(objects)} of {len(frame)} points")
