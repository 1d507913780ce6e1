"""Pipeline configuration: one JSON file with per-profile defaults plus
command-line overrides, validated up front with field-qualified error messages.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .detector import CAMERA_AREA, LIDAR_AREA, DbscanConfig, DetectionConfig, OperationArea
from .gp import GpConfig, default_test_angles
from .ground import PlaneModel, RansacConfig
from .sim import LIDAR_PLANE, CAMERA_PLANE, Scenario, SensorProfile, profile_by_name, scenario_by_name
from .tracker import MotionConfig


class ConfigError(ValueError):
    """Invalid pipeline configuration; the message names the offending field."""


@dataclass
class PipelineConfig:
    seed: int
    profile: SensorProfile
    input_source: str
    out_dir: Path
    scenario: Scenario | None
    plane_prior: PlaneModel
    preselect_margin: float
    voxel_cell: float
    ransac: RansacConfig
    detection: DetectionConfig
    gp: GpConfig
    motion: MotionConfig
    contour_bins: int = 36
    contour_band: float = 0.01
    iekf_max_iter: int = 10
    iekf_tol: float = 1e-6
    prior_dims: tuple[float, float] = (0.39, 0.33)

    @property
    def simulated_trajectory(self) -> str | None:
        if self.input_source.startswith("simulate:"):
            return self.input_source.split(":", 1)[1]
        return None


def _build(section: str, ctor, **kwargs):
    try:
        return ctor(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{section}: {exc}") from exc


def _take(raw: dict, section: str, allowed: set[str]) -> dict:
    sub = raw.get(section) or {}
    if not isinstance(sub, dict):
        raise ConfigError(f"{section}: expected an object")
    unknown = set(sub) - allowed
    if unknown:
        raise ConfigError(f"{section}: unknown field(s) {sorted(unknown)}")
    return sub


def set_by_path(raw: dict, dotted: str, value):
    """Apply one --set override; the value is parsed as JSON when possible."""
    try:
        parsed = json.loads(value)
    except (json.JSONDecodeError, TypeError):
        parsed = value
    keys = dotted.split(".")
    node = raw
    for k in keys[:-1]:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise ConfigError(f"--set {dotted}: {k} is not an object")
    node[keys[-1]] = parsed


def pipeline_config_from_dict(raw: dict, base_dir: Path | None = None) -> PipelineConfig:
    """Validate a parsed JSON config and fill profile-dependent defaults."""
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected a JSON object")

    known = {
        "seed", "profile", "profile_overrides", "input", "out_dir", "scenario",
        "ground", "detection", "gp", "motion", "tracker",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"top level: unknown field(s) {sorted(unknown)}")

    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed: must be a non-negative integer")

    profile_name = raw.get("profile", "lidar_like")
    overrides = _take(raw, "profile_overrides", {
        "rate", "base_noise", "depth_noise_coeff", "max_range",
        "points_per_frame_mean", "ground_points_mean", "sensor_height",
    })
    profile = _build("profile", profile_by_name, name=profile_name, **overrides)
    is_lidar = profile.kind == "lidar_like"

    input_source = raw.get("input", "simulate:straight")
    if not isinstance(input_source, str):
        raise ConfigError("input: expected a string")
    scenario = None
    if input_source.startswith("simulate:"):
        name = input_source.split(":", 1)[1]
        scn_over = _take(raw, "scenario", {
            "duration", "robot_dims", "speed", "turn_rate", "start",
            "start_heading", "seed", "clutter",
        })
        scn_over = dict(scn_over)
        if "robot_dims" in scn_over:
            scn_over["robot_dims"] = tuple(scn_over["robot_dims"])
        if "start" in scn_over:
            scn_over["start"] = tuple(scn_over["start"])
        if "clutter" in scn_over:
            from .sim import Box
            scn_over["clutter"] = tuple(
                Box(center=tuple(b["center"]), yaw=b.get("yaw", 0.0), dims=tuple(b["dims"]))
                for b in scn_over["clutter"]
            )
        scn_over.setdefault("seed", seed)
        scenario = _build("scenario", scenario_by_name, name=name, **scn_over)
    else:
        src = Path(input_source)
        if base_dir is not None and not src.is_absolute():
            src = base_dir / src
        if not src.is_dir():
            raise ConfigError(f"input: frame directory {src} does not exist")
        input_source = str(src)

    ground = _take(raw, "ground", {"prior", "preselect_margin", "voxel_cell", "ransac"})
    prior_raw = ground.get("prior")
    if prior_raw is None:
        plane_prior = LIDAR_PLANE if is_lidar else CAMERA_PLANE
    else:
        if len(prior_raw) != 4:
            raise ConfigError("ground.prior: expected 4 coefficients")
        plane_prior = PlaneModel.from_array(prior_raw)
    preselect_margin = ground.get("preselect_margin", 1.0)
    voxel_cell = ground.get("voxel_cell", 0.1)
    if preselect_margin <= 0:
        raise ConfigError("ground.preselect_margin: must be positive")
    if voxel_cell <= 0:
        raise ConfigError("ground.voxel_cell: must be positive")
    ransac_raw = ground.get("ransac") or {}
    ransac_raw.setdefault("seed", seed)
    ransac = _build("ground.ransac", RansacConfig, **ransac_raw)

    det = _take(raw, "detection", {
        "area", "ground_margin", "dbscan", "feature_prior", "feature_weights",
        "cost_threshold",
    })
    area_raw = det.get("area")
    if area_raw is None:
        area = LIDAR_AREA if is_lidar else CAMERA_AREA
    elif len(area_raw) == 6:
        area = _build("detection.area", OperationArea, *[], **dict(
            zip(("x_min", "x_max", "y_min", "y_max", "z_min", "z_max"), area_raw)
        ))
    else:
        raise ConfigError("detection.area: expected 6 bounds [x_min,x_max,y_min,y_max,z_min,z_max]")
    dbscan = _build("detection.dbscan", DbscanConfig, **(det.get("dbscan") or {}))
    det_kwargs = {}
    for key in ("ground_margin", "cost_threshold"):
        if key in det:
            det_kwargs[key] = det[key]
    for key in ("feature_prior", "feature_weights"):
        if key in det:
            det_kwargs[key] = tuple(det[key])
    detection = _build("detection", DetectionConfig, area=area, dbscan=dbscan, **det_kwargs)

    gp_raw = dict(_take(raw, "gp", {
        "num_angles", "test_angles", "signal_std", "mean_radius_std", "noise_std",
        "length_scale", "forgetting",
    }))
    if "test_angles" in gp_raw:
        gp_raw["test_angles"] = tuple(gp_raw.pop("test_angles"))
        gp_raw.pop("num_angles", None)
    else:
        gp_raw["test_angles"] = default_test_angles(int(gp_raw.pop("num_angles", 10)))
    gp = _build("gp", GpConfig, **gp_raw)

    motion_raw = dict(_take(raw, "motion", {"accel_noise", "meas_noise", "period"}))
    motion_raw.setdefault("period", 1.0 / profile.rate)
    motion = _build("motion", MotionConfig, **motion_raw)

    tracker = _take(raw, "tracker", {
        "contour_bins", "contour_band", "max_iter", "tol", "prior_dims",
    })
    tracker_kwargs = {
        "contour_bins": tracker.get("contour_bins", 36),
        "contour_band": tracker.get("contour_band", 0.01),
        "iekf_max_iter": tracker.get("max_iter", 10),
        "iekf_tol": tracker.get("tol", 1e-6),
        "prior_dims": tuple(tracker.get("prior_dims", (0.39, 0.33))),
    }
    if tracker_kwargs["contour_bins"] < 4:
        raise ConfigError("tracker.contour_bins: must be >= 4")
    if tracker_kwargs["contour_band"] <= 0:
        raise ConfigError("tracker.contour_band: must be positive")
    if tracker_kwargs["iekf_max_iter"] < 1:
        raise ConfigError("tracker.max_iter: must be >= 1")
    if any(d <= 0 for d in tracker_kwargs["prior_dims"]):
        raise ConfigError("tracker.prior_dims: must be positive")

    out_dir = Path(raw.get("out_dir", "out"))
    if base_dir is not None and not out_dir.is_absolute():
        out_dir = base_dir / out_dir

    return PipelineConfig(
        seed=seed,
        profile=profile,
        input_source=input_source,
        out_dir=out_dir,
        scenario=scenario,
        plane_prior=plane_prior,
        preselect_margin=float(preselect_margin),
        voxel_cell=float(voxel_cell),
        ransac=ransac,
        detection=detection,
        gp=gp,
        motion=motion,
        **tracker_kwargs,
    )


def load_pipeline_config(path, overrides=(), out_dir=None, seed=None) -> PipelineConfig:
    """Load, override (--set key=value, --out, --seed), and validate a config file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set {item!r}: expected key=value")
        key, _, value = item.partition("=")
        set_by_path(raw, key, value)
    if seed is not None:
        raw["seed"] = seed
    if out_dir is not None:
        raw["out_dir"] = str(out_dir)
    return pipeline_config_from_dict(raw, base_dir=path.parent)
