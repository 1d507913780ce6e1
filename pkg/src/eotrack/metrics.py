"""Evaluation of detection and tracking runs against simulator ground truth."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from shapely.geometry import Polygon

from .detector import Detection
from .gp import GpConfig, gp_regressor, rectangle_radius
from .sim import GroundTruth, ROBOT_LABEL
from .tracker import TrackRecord, wrap_angle


def evaluate_detection(
    detections: Sequence[Detection | None], gt: GroundTruth, min_overlap: float = 0.8
) -> dict:
    """Detection rate and false-pick rate over an aligned frame sequence.

    A frame counts as detected when the returned cluster's points are at least
    ``min_overlap`` ground-truth robot points; a returned cluster below that
    purity is a false pick.
    """
    if len(detections) != gt.num_frames:
        raise ValueError(f"{len(detections)} detections vs {gt.num_frames} ground truth frames")
    correct = picked = 0
    overlaps = []
    for det, labels in zip(detections, gt.labels):
        if det is None:
            overlaps.append(None)
            continue
        picked += 1
        overlap = float(np.mean(labels[det.indices] == ROBOT_LABEL)) if det.size else 0.0
        overlaps.append(overlap)
        if overlap >= min_overlap:
            correct += 1
    n = gt.num_frames
    return {
        "n_frames": n,
        "n_detected": picked,
        "detection_rate": correct / n,
        "false_pick_rate": (picked - correct) / n,
        "overlaps": overlaps,
    }


def contour_polygon(x: float, y: float, heading: float, radii, cfg: GpConfig,
                    samples: int = 360) -> np.ndarray:
    """Closed GP contour sampled at ``samples`` global angles, as (N, 2) vertices."""
    body = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
    weights, _ = gp_regressor(body, cfg)
    r = weights @ np.asarray(radii, dtype=np.float64)
    phi = body + heading
    return np.stack([x + r * np.cos(phi), y + r * np.sin(phi)], axis=1)


def polygon_iou(poly_a: np.ndarray, poly_b: np.ndarray) -> float:
    """Area IoU of two simple polygons."""
    a = Polygon(np.asarray(poly_a)).buffer(0)
    b = Polygon(np.asarray(poly_b)).buffer(0)
    union = a.union(b).area
    if union == 0.0:
        return 0.0
    return a.intersection(b).area / union


def _record_fields(rec) -> dict | None:
    """Normalize a TrackRecord or a parsed track.jsonl row; None if pre-init."""
    if rec is None:
        return None
    if isinstance(rec, TrackRecord):
        s = rec.state
        return {
            "t": rec.t, "x": s.x, "y": s.y, "psi": s.heading,
            "vx": s.vx, "vy": s.vy, "pf": np.asarray(s.radii), "detected": rec.detected,
        }
    if rec.get("x") is None:
        return None
    return {
        "t": rec["t"], "x": rec["x"], "y": rec["y"], "psi": rec["psi"],
        "vx": rec["vx"], "vy": rec["vy"], "pf": np.asarray(rec["pf"], dtype=np.float64),
        "detected": rec["detected"],
    }


def ideal_track_records(gt: GroundTruth, cfg: GpConfig) -> list[dict]:
    """Ground-truth poses with the exact rectangle radii at the test angles.

    Evaluating this synthetic log measures the best extent IoU attainable with
    the finite test-angle parameterization (the self-evaluation ceiling).
    """
    radii = rectangle_radius(np.array(cfg.test_angles), gt.robot_dims[0], gt.robot_dims[1])
    out = []
    for k in range(gt.num_frames):
        x, y, psi = gt.poses[k]
        vx, vy = gt.velocities[k]
        out.append({
            "t": float(gt.timestamps[k]), "x": float(x), "y": float(y), "psi": float(psi),
            "vx": float(vx), "vy": float(vy), "pf": radii, "detected": True,
        })
    return out


def evaluate_tracking(track, gt: GroundTruth, cfg: GpConfig, burn_in: int = 0,
                      include_ceiling: bool = True) -> dict:
    """Centroid/heading/velocity RMSE and mean extent IoU versus ground truth.

    ``track`` is a sequence of TrackRecord objects or parsed track.jsonl rows,
    aligned 1:1 with the ground-truth frames. Heading error is evaluated
    modulo pi because a box footprint is symmetric under half-turns. Records
    from before tracker initialization are skipped.
    """
    track = list(track)
    if len(track) != gt.num_frames:
        raise ValueError(f"{len(track)} track records vs {gt.num_frames} ground truth frames")

    pos_sq, vel_sq, head_sq, ious = [], [], [], []
    for k in range(burn_in, gt.num_frames):
        rec = _record_fields(track[k])
        if rec is None:
            continue
        gx, gy, gpsi = gt.poses[k]
        pos_sq.append((rec["x"] - gx) ** 2 + (rec["y"] - gy) ** 2)
        gvx, gvy = gt.velocities[k]
        vel_sq.append((rec["vx"] - gvx) ** 2 + (rec["vy"] - gvy) ** 2)
        herr = float(wrap_angle(rec["psi"] - gpsi))
        herr = (herr + math.pi / 2.0) % math.pi - math.pi / 2.0
        head_sq.append(herr**2)
        poly = contour_polygon(rec["x"], rec["y"], rec["psi"], rec["pf"], cfg)
        ious.append(polygon_iou(poly, gt.extent_polys[k]))

    if not pos_sq:
        raise ValueError("no initialized track records to evaluate")
    result = {
        "n_evaluated": len(pos_sq),
        "burn_in": burn_in,
        "centroid_rmse": math.sqrt(float(np.mean(pos_sq))),
        "velocity_rmse": math.sqrt(float(np.mean(vel_sq))),
        "heading_rmse_mod_pi": math.sqrt(float(np.mean(head_sq))),
        "extent_iou_mean": float(np.mean(ious)),
    }
    if include_ceiling:
        ceiling = evaluate_tracking(
            ideal_track_records(gt, cfg), gt, cfg, burn_in=burn_in, include_ceiling=False
        )
        result["extent_iou_ceiling"] = ceiling["extent_iou_mean"]
    return result
