"""End-to-end pipeline: frames (simulated or from disk) -> ground plane ->
per-frame detection -> GP extended-object tracking -> JSONL artifacts and
metrics. All outputs are deterministic for a fixed config and seed.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .config import PipelineConfig
from .detector import Detection, detect_target
from .ground import PlaneModel, preselect_near_plane, ransac_plane
from .metrics import evaluate_detection, evaluate_tracking
from .pointcloud import (
    PointCloudFrame,
    frame_filename,
    load_frame_dir,
    save_frame,
    voxel_downsample,
)
from .sim import (
    GroundTruth,
    generate_scenario,
    read_ground_truth,
    write_ground_truth,
)
from .tracker import GpTracker, project_to_tracking_plane


class PipelineError(RuntimeError):
    """Runtime failure while executing the pipeline (I/O, alignment, inputs)."""


def _dump(obj) -> str:
    return json.dumps(obj, allow_nan=False)


def resolve_frames(config: PipelineConfig) -> tuple[list[PointCloudFrame], GroundTruth | None]:
    """Produce the frame sequence: simulate a scenario or read a directory."""
    if config.scenario is not None:
        return generate_scenario(config.scenario, config.profile)
    frames = load_frame_dir(config.input_source)
    if not frames:
        raise PipelineError(f"no frames found in {config.input_source}")
    gt_path = Path(config.input_source) / "gt.jsonl"
    gt = read_ground_truth(gt_path) if gt_path.is_file() else None
    return frames, gt


def fit_ground_plane(frames, config: PipelineConfig) -> PlaneModel:
    """Initialization phase: preselect near the prior, downsample, RANSAC."""
    if not frames:
        raise PipelineError("need at least one frame to fit the ground plane")
    near = preselect_near_plane(frames[0], config.plane_prior, config.preselect_margin)
    down = voxel_downsample(near, config.voxel_cell)
    return ransac_plane(down, config.ransac)


def _detection_record(index: int, det: Detection | None, overlap) -> dict:
    if det is None:
        return {
            "frame_index": index, "detected": False, "cost": None,
            "bbox": None, "point_count": 0, "robot_overlap": None,
        }
    return {
        "frame_index": index,
        "detected": True,
        "cost": float(det.cost),
        "bbox": {
            "center": [float(v) for v in det.bbox.center],
            "axes": [[float(v) for v in row] for row in det.bbox.axes],
            "half_extents": [float(v) for v in det.bbox.half_extents],
        },
        "point_count": int(det.size),
        "robot_overlap": overlap,
    }


def _track_record(t: float, rec) -> dict:
    if rec is None:
        return {
            "t": t, "x": None, "y": None, "psi": None, "vx": None, "vy": None,
            "omega": None, "pf": None, "cov_diag": None, "detected": False,
        }
    s = rec.state
    return {
        "t": rec.t,
        "x": s.x, "y": s.y, "psi": s.heading,
        "vx": s.vx, "vy": s.vy, "omega": s.turn_rate,
        "pf": [float(v) for v in s.radii],
        "cov_diag": [float(v) for v in rec.cov_diag],
        "detected": rec.detected,
    }


def init_ground(config: PipelineConfig) -> PlaneModel:
    """The `init-ground` command: fit and persist the ground plane only."""
    frames, _ = resolve_frames(config)
    plane = fit_ground_plane(frames, config)
    config.out_dir.mkdir(parents=True, exist_ok=True)
    (config.out_dir / "plane.json").write_text(_dump([plane.a, plane.b, plane.c, plane.d]) + "\n")
    return plane


def simulate(config: PipelineConfig, frame_format: str = "pcd_ascii") -> Path:
    """The `simulate` command: persist frames and ground truth for replay."""
    if config.scenario is None:
        raise PipelineError("simulate requires an input of the form simulate:<trajectory>")
    frames, gt = generate_scenario(config.scenario, config.profile)
    frames_dir = config.out_dir / "frames"
    frames_dir.mkdir(parents=True, exist_ok=True)
    for k, frame in enumerate(frames):
        save_frame(frame, frames_dir / frame_filename(k, frame.timestamp, frame_format), frame_format)
    write_ground_truth(gt, frames_dir / "gt.jsonl")
    return frames_dir


def run_pipeline(config: PipelineConfig) -> dict:
    """The `run` command: detection plus tracking over the whole sequence.

    Writes plane.json, detections.jsonl, track.jsonl, gt.jsonl and
    metrics.json (the last two only when ground truth is available) into the
    output directory, and returns the metrics dictionary.
    """
    frames, gt = resolve_frames(config)
    plane = fit_ground_plane(frames, config)

    detections: list[Detection | None] = []
    for frame in frames:
        detections.append(detect_target(frame, plane, config.detection))

    tracker: GpTracker | None = None
    records = []
    t_prev = None
    for frame, det in zip(frames, detections):
        meas = project_to_tracking_plane(det.points, plane) if det is not None else None
        if tracker is None:
            if meas is None:
                records.append(None)
                continue
            tracker = GpTracker.from_prior(
                config.prior_dims, meas.mean(axis=0), config.motion, config.gp,
                t0=frame.timestamp,
                contour_bins=config.contour_bins, contour_band=config.contour_band,
                max_iter=config.iekf_max_iter, tol=config.iekf_tol,
            )
            t_prev = frame.timestamp
        tracker.step(meas, frame.timestamp - t_prev)
        t_prev = frame.timestamp
        records.append(tracker.log[-1])

    config.out_dir.mkdir(parents=True, exist_ok=True)
    (config.out_dir / "plane.json").write_text(_dump([plane.a, plane.b, plane.c, plane.d]) + "\n")

    overlaps = [None] * len(frames)
    metrics: dict = {
        "filter_health": {
            "min_covariance_eigenvalue": float(tracker.min_eigenvalue) if tracker else None,
        }
    }
    if gt is not None:
        det_metrics = evaluate_detection(detections, gt)
        overlaps = det_metrics.pop("overlaps")
        track_metrics = evaluate_tracking(records, gt, config.gp, burn_in=5)
        metrics["detection"] = det_metrics
        metrics["tracking"] = track_metrics

    with open(config.out_dir / "detections.jsonl", "w") as fh:
        for k, det in enumerate(detections):
            fh.write(_dump(_detection_record(k, det, overlaps[k])) + "\n")
    with open(config.out_dir / "track.jsonl", "w") as fh:
        for frame, rec in zip(frames, records):
            fh.write(_dump(_track_record(frame.timestamp, rec)) + "\n")
    if gt is not None:
        write_ground_truth(gt, config.out_dir / "gt.jsonl")
        (config.out_dir / "metrics.json").write_text(json.dumps(metrics, indent=2) + "\n")
    return metrics


def evaluate(config: PipelineConfig, run_dir: Path | None = None) -> dict:
    """The `evaluate` command: recompute metrics from persisted artifacts."""
    run_dir = Path(run_dir) if run_dir is not None else config.out_dir
    gt_path = run_dir / "gt.jsonl"
    det_path = run_dir / "detections.jsonl"
    track_path = run_dir / "track.jsonl"
    for p in (gt_path, det_path, track_path):
        if not p.is_file():
            raise PipelineError(f"missing artifact {p}")
    gt = read_ground_truth(gt_path)
    det_rows = [json.loads(ln) for ln in det_path.read_text().splitlines() if ln.strip()]
    track_rows = [json.loads(ln) for ln in track_path.read_text().splitlines() if ln.strip()]

    if len(det_rows) != gt.num_frames or len(track_rows) != gt.num_frames:
        raise PipelineError("artifact frame counts do not match the ground truth")
    n = gt.num_frames
    detected = [r["detected"] for r in det_rows]
    correct = sum(
        1 for r in det_rows
        if r["detected"] and r["robot_overlap"] is not None and r["robot_overlap"] >= 0.8
    )
    det_metrics = {
        "n_frames": n,
        "n_detected": int(sum(detected)),
        "detection_rate": correct / n,
        "false_pick_rate": (int(sum(detected)) - correct) / n,
    }
    track_metrics = evaluate_tracking(track_rows, gt, config.gp, burn_in=5)
    metrics = {"detection": det_metrics, "tracking": track_metrics}
    (run_dir / "metrics.json").write_text(json.dumps(metrics, indent=2) + "\n")
    return metrics
