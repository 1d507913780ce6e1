"""Synthetic scene generator: a box-shaped robot driving over a ground plane,
rendered as per-frame point clouds under LiDAR-like or camera-like noise.

Scenes are built in a "floor" frame (z up, ground at z = 0) and transformed
into the sensor frame implied by each profile: the LiDAR sits 1 m above the
floor with its z axis up (ground plane z = -1), the camera 0.5 m up with
x right / y down / z forward (ground plane y = 0.5). Point counts are Poisson.
Clutter boxes are hollow and return points only from sensor-facing faces; the
robot returns from its whole outer surface (its real-world counterpart is
structurally busy, not an empty shell), except the ground-flush bottom.
Isotropic Gaussian noise grows with range for the camera profile. Ground truth
carries the exact robot pose per frame, both in floor coordinates and
projected into the 2D tracking chart of the true ground plane, plus per-point
labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .ground import PlaneModel
from .pointcloud import PointCloudFrame
from .tracker import plane_basis, project_to_tracking_plane, wrap_angle

GROUND_LABEL = 0
ROBOT_LABEL = 1
CLUTTER_LABEL = 2

LIDAR_PLANE = PlaneModel(0.0, 0.0, 1.0, 1.0)
CAMERA_PLANE = PlaneModel(0.0, 1.0, 0.0, -0.5)

# Ground footprint (floor frame) covered by returns, per profile kind.
_GROUND_RECT = {
    "lidar_like": ((-4.0, 4.0), (0.0, 2.7)),
    "camera_like": ((-4.0, 4.0), (0.0, 2.5)),
}


@dataclass(frozen=True)
class SensorProfile:
    """Noise and rate model of one point cloud source."""

    kind: str
    rate: float
    base_noise: float
    depth_noise_coeff: float
    max_range: float
    points_per_frame_mean: float
    ground_points_mean: float
    sensor_height: float

    def __post_init__(self):
        if self.kind not in ("lidar_like", "camera_like"):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.rate <= 0 or self.max_range <= 0:
            raise ValueError("rate and max_range must be positive")
        if self.base_noise < 0 or self.depth_noise_coeff < 0:
            raise ValueError("noise parameters must be non-negative")

    def noise_std(self, depth) -> np.ndarray:
        """Per-point standard deviation, growing quadratically with range."""
        return self.base_noise * (1.0 + self.depth_noise_coeff * np.square(depth))

    @property
    def true_plane(self) -> PlaneModel:
        return LIDAR_PLANE if self.kind == "lidar_like" else CAMERA_PLANE


def lidar_profile(**overrides) -> SensorProfile:
    base = SensorProfile(
        kind="lidar_like", rate=4.4, base_noise=0.008, depth_noise_coeff=0.0,
        max_range=75.0, points_per_frame_mean=6000.0, ground_points_mean=1200.0,
        sensor_height=1.0,
    )
    return replace(base, **overrides) if overrides else base


def camera_profile(**overrides) -> SensorProfile:
    # Quadratic depth growth. The coefficient is capped so the std stays below
    # the clustering cliff (~0.015 m at this point budget) across the default
    # scene's working ranges (<= 2.6 m); eps=0.03 / min_points=30 cannot form
    # clusters on tractable point counts at much larger spreads.
    base = SensorProfile(
        kind="camera_like", rate=30.0, base_noise=0.006, depth_noise_coeff=0.2,
        max_range=3.0, points_per_frame_mean=7500.0, ground_points_mean=1500.0,
        sensor_height=0.5,
    )
    return replace(base, **overrides) if overrides else base


def profile_by_name(name: str, **overrides) -> SensorProfile:
    if name == "lidar_like":
        return lidar_profile(**overrides)
    if name == "camera_like":
        return camera_profile(**overrides)
    raise ValueError(f"unknown sensor profile {name!r}")


@dataclass(frozen=True)
class Box:
    """Axis dims (length, width, height) of a yawed box resting on the floor."""

    center: tuple[float, float]
    yaw: float
    dims: tuple[float, float, float]


def default_clutter() -> tuple[Box, ...]:
    """A thin wall slab and a slim post, both robot-unlike, to exercise rejection.

    Both shapes score far above the detection cost threshold (the slab through
    its edge variance, the post through variance and areas); compact near-cubic
    shapes are deliberately avoided because their feature cost can dip below
    the threshold once noise inflates their edges.
    """
    return (
        Box(center=(1.5, 2.1), yaw=0.0, dims=(0.4, 0.08, 0.4)),
        Box(center=(-1.7, 1.0), yaw=0.0, dims=(0.1, 0.1, 0.5)),
    )


@dataclass(frozen=True)
class Scenario:
    """Robot trajectory, extent, and scene content for one simulated run."""

    trajectory: str = "straight"
    duration: float = 10.0
    robot_dims: tuple[float, float, float] = (0.39, 0.33, 0.21)
    speed: float = 0.3
    turn_rate: float = 0.0
    start: tuple[float, float] = (-1.5, 1.7)
    start_heading: float = 0.0
    clutter: tuple[Box, ...] = field(default_factory=default_clutter)
    seed: int = 0

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if any(d <= 0 for d in self.robot_dims):
            raise ValueError("robot_dims must be positive")


def straight_scenario(**overrides) -> Scenario:
    return replace(Scenario(trajectory="straight"), **overrides) if overrides else Scenario()


def turning_scenario(**overrides) -> Scenario:
    base = Scenario(
        trajectory="turning", speed=0.15, turn_rate=0.45,
        start=(0.35, 1.65), start_heading=math.pi / 2.0,
    )
    return replace(base, **overrides) if overrides else base


def scenario_by_name(name: str, **overrides) -> Scenario:
    if name == "straight":
        return straight_scenario(**overrides)
    if name == "turning":
        return turning_scenario(**overrides)
    raise ValueError(f"unknown scenario {name!r}")


def pose_at(scenario: Scenario, t: float) -> tuple[float, float, float, float, float]:
    """Exact unicycle pose and velocity (floor frame) at time t."""
    x0, y0 = scenario.start
    psi0, v, w = scenario.start_heading, scenario.speed, scenario.turn_rate
    if abs(w) < 1e-12:
        x = x0 + v * t * math.cos(psi0)
        y = y0 + v * t * math.sin(psi0)
        psi = psi0
    else:
        psi = psi0 + w * t
        x = x0 + v / w * (math.sin(psi) - math.sin(psi0))
        y = y0 - v / w * (math.cos(psi) - math.cos(psi0))
    return x, y, float(wrap_angle(psi)), v * math.cos(psi), v * math.sin(psi)


def _rot_z(yaw: float) -> np.ndarray:
    c, s = math.cos(yaw), math.sin(yaw)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _box_faces(box: Box, pose_xy, yaw: float):
    """(normal, face_center, area, axis, sign) per face, floor frame."""
    half = np.asarray(box.dims) / 2.0
    center = np.array([pose_xy[0], pose_xy[1], half[2]])
    rot = _rot_z(yaw)
    areas = (
        box.dims[1] * box.dims[2],
        box.dims[0] * box.dims[2],
        box.dims[0] * box.dims[1],
    )
    faces = []
    for axis in range(3):
        for sign in (1.0, -1.0):
            normal = rot[:, axis] * sign
            face_center = center + normal * half[axis]
            faces.append((normal, face_center, areas[axis], axis, sign))
    return faces, center, rot, half


def _select_faces(faces, sensor, mode: str):
    if mode == "sensor_facing":
        return [f for f in faces if f[0] @ (sensor - f[1]) > 0.0]
    if mode == "all_but_bottom":
        return [f for f in faces if not (f[3] == 2 and f[4] < 0)]
    raise ValueError(f"unknown face mode {mode!r}")


def sample_box_surface(rng, box: Box, sensor_floor, count: int,
                       pose_xy=None, yaw=None, faces_mode: str = "sensor_facing") -> np.ndarray:
    """Uniform samples over selected faces of a box (floor frame).

    The pose defaults to the box's own center/yaw; a moving robot passes its
    current pose instead. Faces are chosen with probability proportional to
    their area. ``faces_mode`` is ``sensor_facing`` for hollow objects that
    only return from surfaces turned toward the sensor, or ``all_but_bottom``
    for structurally busy objects (the robot) whose whole outer surface
    scatters returns.
    """
    pose_xy = box.center if pose_xy is None else pose_xy
    yaw = box.yaw if yaw is None else yaw
    faces, center, rot, half = _box_faces(box, pose_xy, yaw)
    sensor = np.asarray(sensor_floor, dtype=np.float64)
    visible = _select_faces(faces, sensor, faces_mode)
    if not visible or count <= 0:
        return np.empty((0, 3))
    areas = np.array([f[2] for f in visible])
    choice = rng.choice(len(visible), size=count, p=areas / areas.sum())
    uv = rng.uniform(-1.0, 1.0, size=(count, 2))
    pts = np.empty((count, 3))
    for i, (normal, _, _, axis, sign) in enumerate(visible):
        mask = choice == i
        if not mask.any():
            continue
        others = [a for a in range(3) if a != axis]
        body = np.zeros((int(mask.sum()), 3))
        body[:, axis] = sign * half[axis]
        body[:, others[0]] = uv[mask, 0] * half[others[0]]
        body[:, others[1]] = uv[mask, 1] * half[others[1]]
        pts[mask] = center + body @ rot.T
    return pts


def visible_surface_area(box: Box, sensor_floor, pose_xy=None, yaw=None,
                         faces_mode: str = "sensor_facing") -> float:
    """Total area of the box faces selected by ``faces_mode``."""
    pose_xy = box.center if pose_xy is None else pose_xy
    yaw = box.yaw if yaw is None else yaw
    faces, _, _, _ = _box_faces(box, pose_xy, yaw)
    sensor = np.asarray(sensor_floor, dtype=np.float64)
    return float(sum(f[2] for f in _select_faces(faces, sensor, faces_mode)))


def box_surface_distance(points_floor: np.ndarray, box: Box, pose_xy=None, yaw=None) -> np.ndarray:
    """Distance of floor-frame points to the surface of a box (0 on the shell)."""
    pose_xy = box.center if pose_xy is None else pose_xy
    yaw = box.yaw if yaw is None else yaw
    half = np.asarray(box.dims) / 2.0
    center = np.array([pose_xy[0], pose_xy[1], half[2]])
    rot = _rot_z(yaw)
    body = (np.asarray(points_floor).reshape(-1, 3) - center) @ rot
    outside = np.maximum(np.abs(body) - half, 0.0)
    d_out = np.linalg.norm(outside, axis=1)
    d_in = np.max(np.abs(body) - half, axis=1)  # negative inside
    return np.where(d_out > 0.0, d_out, -d_in)


def floor_to_sensor(points: np.ndarray, profile: SensorProfile) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    h = profile.sensor_height
    if profile.kind == "lidar_like":
        return pts - np.array([0.0, 0.0, h])
    return np.stack([pts[:, 0], h - pts[:, 2], pts[:, 1]], axis=1)


def sensor_to_floor(points: np.ndarray, profile: SensorProfile) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    h = profile.sensor_height
    if profile.kind == "lidar_like":
        return pts + np.array([0.0, 0.0, h])
    return np.stack([pts[:, 0], pts[:, 2], h - pts[:, 1]], axis=1)


def _floor_direction_to_sensor(direction: np.ndarray, profile: SensorProfile) -> np.ndarray:
    d = np.asarray(direction, dtype=np.float64)
    if profile.kind == "lidar_like":
        return d
    return np.array([d[0], -d[2], d[1]])


@dataclass
class GroundTruth:
    """Per-frame truth for evaluation, in the true plane's 2D chart."""

    plane: PlaneModel
    robot_dims: tuple[float, float, float]
    timestamps: np.ndarray
    poses: np.ndarray          # (F, 3): chart x, y, heading
    velocities: np.ndarray     # (F, 2): chart velocity
    floor_poses: np.ndarray    # (F, 3): floor-frame x, y, heading
    extent_polys: np.ndarray   # (F, 4, 2): footprint rectangle in the chart
    labels: list[np.ndarray]   # per-point labels per frame

    @property
    def num_frames(self) -> int:
        return len(self.timestamps)


def _footprint_corners(pose_xy, yaw: float, dims) -> np.ndarray:
    hx, hy = dims[0] / 2.0, dims[1] / 2.0
    corners = np.array([[hx, hy], [-hx, hy], [-hx, -hy], [hx, -hy]])
    c, s = math.cos(yaw), math.sin(yaw)
    rot = np.array([[c, -s], [s, c]])
    return corners @ rot.T + np.asarray(pose_xy)


def _chart_pose(pose_xy, yaw: float, profile: SensorProfile):
    """Project a floor pose into the true plane's tracking chart."""
    plane = profile.true_plane
    pos_floor = np.array([[pose_xy[0], pose_xy[1], 0.0]])
    pos = project_to_tracking_plane(floor_to_sensor(pos_floor, profile), plane)[0]
    _, u, v = plane_basis(plane)
    direction = _floor_direction_to_sensor(
        np.array([math.cos(yaw), math.sin(yaw), 0.0]), profile
    )
    heading = math.atan2(direction @ v, direction @ u)
    return pos, heading, (u, v)


def write_ground_truth(gt: GroundTruth, path) -> None:
    """Persist ground truth as JSONL: one meta line, then one line per frame."""
    import json

    with open(path, "w") as fh:
        meta = {
            "type": "meta",
            "plane": [float(v) for v in gt.plane.as_array()],
            "robot_dims": [float(v) for v in gt.robot_dims],
        }
        fh.write(json.dumps(meta) + "\n")
        for k in range(gt.num_frames):
            row = {
                "frame": k,
                "t": float(gt.timestamps[k]),
                "x": float(gt.poses[k, 0]),
                "y": float(gt.poses[k, 1]),
                "psi": float(gt.poses[k, 2]),
                "vx": float(gt.velocities[k, 0]),
                "vy": float(gt.velocities[k, 1]),
                "floor_pose": [float(v) for v in gt.floor_poses[k]],
                "polygon": [[float(x), float(y)] for x, y in gt.extent_polys[k]],
                "labels": [int(v) for v in gt.labels[k]],
            }
            fh.write(json.dumps(row) + "\n")


def read_ground_truth(path) -> GroundTruth:
    """Inverse of write_ground_truth."""
    import json

    with open(path) as fh:
        lines = [json.loads(ln) for ln in fh if ln.strip()]
    if not lines or lines[0].get("type") != "meta":
        raise ValueError(f"{path}: missing ground-truth meta line")
    meta, rows = lines[0], lines[1:]
    return GroundTruth(
        plane=PlaneModel.from_array(meta["plane"]),
        robot_dims=tuple(meta["robot_dims"]),
        timestamps=np.array([r["t"] for r in rows]),
        poses=np.array([[r["x"], r["y"], r["psi"]] for r in rows]),
        velocities=np.array([[r["vx"], r["vy"]] for r in rows]),
        floor_poses=np.array([r["floor_pose"] for r in rows]),
        extent_polys=np.array([r["polygon"] for r in rows]),
        labels=[np.array(r["labels"], dtype=np.int64) for r in rows],
    )


def generate_scenario(
    scenario: Scenario, profile: SensorProfile
) -> tuple[list[PointCloudFrame], GroundTruth]:
    """Render per-frame point clouds and matching ground truth.

    Deterministic for a fixed (scenario.seed, profile). Frame k carries
    timestamp (k + 1) / rate; frame count is round(duration * rate).
    """
    rng = np.random.default_rng(scenario.seed)
    n_frames = int(round(scenario.duration * profile.rate))
    if n_frames < 1:
        raise ValueError("duration and rate give an empty sequence")

    sensor_floor = np.array([0.0, 0.0, profile.sensor_height])
    # clutter is sampled at the robot's surface density
    length, width, height = scenario.robot_dims
    robot_area = 2 * (length * height) + 2 * (width * height) + length * width
    density = profile.points_per_frame_mean / robot_area
    (gx0, gx1), (gy0, gy1) = _GROUND_RECT[profile.kind]
    ground_area_mean = profile.ground_points_mean
    robot_box = Box(center=scenario.start, yaw=scenario.start_heading, dims=scenario.robot_dims)

    frames: list[PointCloudFrame] = []
    labels_per_frame: list[np.ndarray] = []
    timestamps = np.empty(n_frames)
    floor_poses = np.empty((n_frames, 3))
    chart_poses = np.empty((n_frames, 3))
    chart_vels = np.empty((n_frames, 2))
    polys = np.empty((n_frames, 4, 2))

    plane = profile.true_plane
    for k in range(n_frames):
        t = (k + 1) / profile.rate
        x, y, psi, vx, vy = pose_at(scenario, t)

        n_robot = rng.poisson(profile.points_per_frame_mean)
        robot_pts = sample_box_surface(
            rng, robot_box, sensor_floor, n_robot, (x, y), psi, faces_mode="all_but_bottom"
        )

        clutter_chunks = []
        for box in scenario.clutter:
            mean = density * visible_surface_area(box, sensor_floor)
            n_box = rng.poisson(mean)
            clutter_chunks.append(sample_box_surface(rng, box, sensor_floor, n_box))
        clutter_pts = np.concatenate(clutter_chunks) if clutter_chunks else np.empty((0, 3))

        n_ground = rng.poisson(ground_area_mean)
        ground_pts = np.stack(
            [
                rng.uniform(gx0, gx1, n_ground),
                rng.uniform(gy0, gy1, n_ground),
                np.zeros(n_ground),
            ],
            axis=1,
        )

        pts_floor = np.concatenate([robot_pts, clutter_pts, ground_pts])
        labels = np.concatenate(
            [
                np.full(len(robot_pts), ROBOT_LABEL),
                np.full(len(clutter_pts), CLUTTER_LABEL),
                np.full(len(ground_pts), GROUND_LABEL),
            ]
        ).astype(np.int64)

        pts_sensor = floor_to_sensor(pts_floor, profile)
        depth = np.linalg.norm(pts_sensor, axis=1)
        in_range = depth <= profile.max_range
        pts_sensor, labels, depth = pts_sensor[in_range], labels[in_range], depth[in_range]
        std = profile.noise_std(depth)
        pts_sensor = pts_sensor + rng.standard_normal(pts_sensor.shape) * std[:, None]

        frames.append(PointCloudFrame(t, pts_sensor, profile.kind))
        labels_per_frame.append(labels)

        timestamps[k] = t
        floor_poses[k] = (x, y, psi)
        pos2d, heading2d, (u, v) = _chart_pose((x, y), psi, profile)
        chart_poses[k] = (pos2d[0], pos2d[1], heading2d)
        vel_dir = _floor_direction_to_sensor(np.array([vx, vy, 0.0]), profile)
        chart_vels[k] = (vel_dir @ u, vel_dir @ v)
        corners_floor = _footprint_corners((x, y), psi, scenario.robot_dims)
        corners3 = np.concatenate([corners_floor, np.zeros((4, 1))], axis=1)
        polys[k] = project_to_tracking_plane(floor_to_sensor(corners3, profile), plane)

    gt = GroundTruth(
        plane=plane,
        robot_dims=scenario.robot_dims,
        timestamps=timestamps,
        poses=chart_poses,
        velocities=chart_vels,
        floor_poses=floor_poses,
        extent_polys=polys,
        labels=labels_per_frame,
    )
    return frames, gt
