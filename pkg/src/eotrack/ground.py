"""Ground plane estimation and removal.

The plane ax + by + cz + d = 0 is estimated once during initialization from
points preselected near a prior plane, via seeded RANSAC over 3-point
hypotheses plus a least-squares refit, and is then reused to strip ground
returns from every subsequent frame.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pointcloud import PointCloudFrame


class RansacError(RuntimeError):
    """Plane estimation failed."""


class TooFewPointsError(RansacError):
    pass


class DegenerateInputError(RansacError):
    pass


class InsufficientInliersError(RansacError):
    pass


@dataclass(frozen=True)
class PlaneModel:
    """Coefficients of ax + by + cz + d = 0; kept unit-normal and sign-canonical."""

    a: float
    b: float
    c: float
    d: float

    @property
    def normal(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c])

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d])

    @classmethod
    def from_array(cls, arr) -> "PlaneModel":
        a, b, c, d = (float(v) for v in arr)
        return cls(a, b, c, d)


@dataclass(frozen=True)
class RansacConfig:
    """RANSAC parameters: inlier threshold (m), iteration budget, minimum support."""

    inlier_threshold: float = 0.02
    max_iterations: int = 100
    min_inliers: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.inlier_threshold <= 0:
            raise ValueError("inlier_threshold must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.min_inliers < 3:
            raise ValueError("min_inliers must be >= 3")


def normalize_plane(plane: PlaneModel) -> PlaneModel:
    """Scale to a unit normal and canonicalize the sign.

    The stored normal satisfies c > 0, or (c == 0 and b > 0), or
    (c == b == 0 and a > 0); flipping all four coefficients leaves the plane
    itself unchanged.
    """
    v = plane.as_array()
    if not np.isfinite(v).all():
        raise ValueError("plane coefficients must be finite")
    norm = float(np.linalg.norm(v[:3]))
    if norm == 0.0:
        raise ValueError("plane normal must be nonzero")
    v = v / norm
    a, b, c = v[0], v[1], v[2]
    if c < 0 or (c == 0 and (b < 0 or (b == 0 and a < 0))):
        v = -v
    return PlaneModel(*(float(x) for x in v))


def plane_distances(points: np.ndarray, plane: PlaneModel) -> np.ndarray:
    """Unsigned distances (m) of an (N, 3) array to a normalized plane."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    return np.abs(pts @ plane.normal + plane.d)


def point_plane_distance(p, plane: PlaneModel) -> float:
    """|a*x + b*y + c*z + d| for one point and a normalized plane."""
    return float(plane_distances(np.asarray(p, dtype=np.float64).reshape(1, 3), plane)[0])


def preselect_near_plane(frame: PointCloudFrame, prior: PlaneModel, margin: float) -> PointCloudFrame:
    """Keep exactly the points within ``margin`` meters of the prior plane."""
    if margin <= 0:
        raise ValueError("margin must be positive")
    prior = normalize_plane(prior)
    keep = plane_distances(frame.points, prior) <= margin
    return frame.with_points(frame.points[keep])


def remove_ground_points(frame: PointCloudFrame, plane: PlaneModel, margin: float) -> PointCloudFrame:
    """Drop points within ``margin`` meters of the fitted ground plane."""
    if margin <= 0:
        raise ValueError("margin must be positive")
    plane = normalize_plane(plane)
    keep = plane_distances(frame.points, plane) > margin
    return frame.with_points(frame.points[keep])


def _lsq_plane(points: np.ndarray) -> tuple[np.ndarray, float]:
    """Least-squares plane: smallest principal direction of the centered scatter."""
    centroid = points.mean(axis=0)
    centered = points - centroid
    _, vecs = np.linalg.eigh(centered.T @ centered)
    normal = vecs[:, 0]
    return normal, float(-normal @ centroid)


def ransac_plane_with_stats(frame: PointCloudFrame, cfg: RansacConfig) -> tuple[PlaneModel, dict]:
    """RANSAC plane fit; also returns per-hypothesis support counts for diagnostics.

    Points are sorted lexicographically before sampling, so the result is
    invariant under permutations of the input for a fixed seed. The winning
    hypothesis is refit by least squares over its inliers; the refit is kept
    only if it does not lose support at the inlier threshold.
    """
    pts = frame.points
    if len(pts) < 3:
        raise TooFewPointsError(f"need >= 3 points, got {len(pts)}")
    order = np.lexsort((pts[:, 2], pts[:, 1], pts[:, 0]))
    pts = pts[order]
    rng = np.random.default_rng(cfg.seed)
    thr = cfg.inlier_threshold

    best_normal = None
    best_d = 0.0
    best_count = 0
    counts = []
    for _ in range(cfg.max_iterations):
        i, j, k = rng.choice(len(pts), size=3, replace=False)
        normal = np.cross(pts[j] - pts[i], pts[k] - pts[i])
        norm = np.linalg.norm(normal)
        if norm < 1e-12:
            counts.append(0)
            continue
        normal = normal / norm
        d = float(-normal @ pts[i])
        count = int((np.abs(pts @ normal + d) <= thr).sum())
        counts.append(count)
        if count > best_count:
            best_count, best_normal, best_d = count, normal, d
    if best_normal is None:
        raise DegenerateInputError("all sampled 3-point hypotheses were collinear")
    if best_count < cfg.min_inliers:
        raise InsufficientInliersError(
            f"best support {best_count} below min_inliers {cfg.min_inliers}"
        )

    inliers = pts[np.abs(pts @ best_normal + best_d) <= thr]
    ref_normal, ref_d = _lsq_plane(inliers)
    ref_count = int((np.abs(pts @ ref_normal + ref_d) <= thr).sum())
    if ref_count >= best_count:
        normal, d, support = ref_normal, ref_d, ref_count
    else:
        normal, d, support = best_normal, best_d, best_count
    plane = normalize_plane(PlaneModel(float(normal[0]), float(normal[1]), float(normal[2]), d))
    return plane, {"support": support, "hypothesis_counts": counts, "n_points": len(pts)}


def ransac_plane(frame: PointCloudFrame, cfg: RansacConfig) -> PlaneModel:
    """Estimate the best-supported plane through a frame (see ransac_plane_with_stats)."""
    plane, _ = ransac_plane_with_stats(frame, cfg)
    return plane
