"""Per-frame heuristic target detection.

Pipeline: crop to the operation area, remove ground points, cluster with
DBSCAN, fit a PCA-aligned bounding box per cluster, score each box by a
weighted L1 distance between its geometric features and a prior feature
vector, and return the cheapest candidate under the cost threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .ground import PlaneModel, plane_distances, normalize_plane
from .pointcloud import PointCloudFrame

# Feature prior and weights for a TurtleBot-sized box target, and the
# per-sensor operation areas and clustering parameters used throughout.
TARGET_FEATURE_PRIOR = (0.39, 0.33, 0.21, 0.005, 0.13, 0.08, 0.07)
TARGET_FEATURE_WEIGHTS = (0.5, 0.5, 0.5, 100.0, 2.0, 1.0, 1.0)


@dataclass(frozen=True)
class OperationArea:
    """Axis-aligned crop box (meters, sensor frame); bounds are inclusive."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    z_min: float
    z_max: float

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max and self.z_min < self.z_max):
            raise ValueError("operation area must satisfy min < max on every axis")

    def contains(self, points: np.ndarray) -> np.ndarray:
        p = np.asarray(points).reshape(-1, 3)
        return (
            (p[:, 0] >= self.x_min) & (p[:, 0] <= self.x_max)
            & (p[:, 1] >= self.y_min) & (p[:, 1] <= self.y_max)
            & (p[:, 2] >= self.z_min) & (p[:, 2] <= self.z_max)
        )


LIDAR_AREA = OperationArea(-4.0, 4.0, 0.0, 2.7, -4.0, 2.0)
CAMERA_AREA = OperationArea(-4.0, 4.0, -2.0, 1.0, 0.0, 2.5)


@dataclass(frozen=True)
class DbscanConfig:
    eps: float = 0.03
    min_points: int = 30

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.min_points < 1:
            raise ValueError("min_points must be >= 1")


@dataclass(frozen=True)
class OrientedBoundingBox:
    """PCA-aligned box: ``axes`` rows are unit directions, extents descending."""

    center: np.ndarray
    axes: np.ndarray
    half_extents: np.ndarray
    degenerate: bool = False


@dataclass(frozen=True)
class GeometricFeatures:
    """Box description: edge lengths (descending), their population variance,
    and the three face areas (l1*l2, l1*l3, l2*l3)."""

    lengths: tuple[float, float, float]
    variance: float
    areas: tuple[float, float, float]

    @classmethod
    def from_edges(cls, edges) -> "GeometricFeatures":
        l1, l2, l3 = sorted((float(e) for e in edges), reverse=True)
        variance = float(np.var([l1, l2, l3]))
        return cls((l1, l2, l3), variance, (l1 * l2, l1 * l3, l2 * l3))

    def as_vector(self) -> np.ndarray:
        return np.array([*self.lengths, self.variance, *self.areas])


@dataclass(frozen=True)
class DetectionConfig:
    """Everything the per-frame detector needs besides the ground plane."""

    area: OperationArea
    ground_margin: float = 0.02
    dbscan: DbscanConfig = DbscanConfig()
    feature_prior: tuple = TARGET_FEATURE_PRIOR
    feature_weights: tuple = TARGET_FEATURE_WEIGHTS
    cost_threshold: float = 1.0

    def __post_init__(self):
        if self.ground_margin <= 0:
            raise ValueError("ground_margin must be positive")
        if self.cost_threshold <= 0:
            raise ValueError("cost_threshold must be positive")
        if len(self.feature_prior) != 7 or len(self.feature_weights) != 7:
            raise ValueError("feature prior and weights must have 7 entries")
        if any(w < 0 for w in self.feature_weights):
            raise ValueError("feature weights must be non-negative")


@dataclass(frozen=True)
class Detection:
    """Winning cluster of one frame: its points, cost, box, and the member
    indices into the frame originally passed to detect_target."""

    points: PointCloudFrame
    cost: float
    bbox: OrientedBoundingBox
    indices: np.ndarray

    @property
    def size(self) -> int:
        return len(self.indices)


def crop_to_operation_area(frame: PointCloudFrame, area: OperationArea) -> PointCloudFrame:
    """Keep the points inside the axis-aligned operation area (inclusive)."""
    return frame.with_points(frame.points[area.contains(frame.points)])


def dbscan(frame: PointCloudFrame, cfg: DbscanConfig) -> list[np.ndarray]:
    """Euclidean DBSCAN; returns clusters as index arrays, noise excluded.

    A point is core iff it has >= min_points neighbors within eps, itself
    included. Clusters are maximal density-connected sets of core points plus
    the border points they reach. Border points go to the first cluster that
    reaches them when clusters are grown in lexicographic coordinate order,
    which makes the output independent of the input permutation: clusters are
    numbered by the lexicographic rank of their smallest core point, and a
    border point joins the lowest-numbered cluster with a core within eps.
    """
    pts = frame.points
    n = len(pts)
    if n == 0:
        return []
    tree = cKDTree(pts)
    pairs = tree.query_pairs(cfg.eps, output_type="ndarray")
    if len(pairs):
        src = np.concatenate([pairs[:, 0], pairs[:, 1]])
        dst = np.concatenate([pairs[:, 1], pairs[:, 0]])
        degree = np.bincount(src, minlength=n)
    else:
        src = dst = np.empty(0, dtype=np.int64)
        degree = np.zeros(n, dtype=np.int64)
    core = (degree + 1) >= cfg.min_points
    if not core.any():
        return []

    # one direction per edge is enough for undirected components
    pair_core = core[pairs[:, 0]] & core[pairs[:, 1]] if len(pairs) else np.empty(0, dtype=bool)
    graph = coo_matrix(
        (
            np.ones(int(pair_core.sum()), dtype=np.int8),
            (pairs[pair_core, 0], pairs[pair_core, 1]),
        ),
        shape=(n, n),
    )
    _, comp = connected_components(graph.tocsr(), directed=False)

    # canonical cluster numbering: by lexicographic rank of each component's
    # first core point
    lex_rank = np.empty(n, dtype=np.int64)
    lex_rank[np.lexsort((pts[:, 2], pts[:, 1], pts[:, 0]))] = np.arange(n)
    first_rank = np.full(n, np.iinfo(np.int64).max)
    np.minimum.at(first_rank, comp[core], lex_rank[core])
    comp_ids = np.unique(comp[core])
    canon = np.full(n, -1, dtype=np.int64)
    canon[comp_ids[np.argsort(first_rank[comp_ids], kind="stable")]] = np.arange(len(comp_ids))

    labels = np.full(n, -1, dtype=np.int64)
    labels[core] = canon[comp[core]]
    # border points: lowest-numbered cluster among adjacent cores
    border_edge = ~core[src] & core[dst]
    if border_edge.any():
        best = np.full(n, np.iinfo(np.int64).max)
        np.minimum.at(best, src[border_edge], labels[dst[border_edge]])
        assigned = best < np.iinfo(np.int64).max
        labels[assigned] = best[assigned]
    return [np.flatnonzero(labels == c) for c in range(len(comp_ids))]


def pca_bounding_box(frame: PointCloudFrame, cluster: np.ndarray) -> OrientedBoundingBox:
    """Oriented bounding box from the principal axes of a cluster.

    Axes are the eigenvectors of the centered covariance; extents come from
    min/max projections. Axes are reordered so the half extents are sorted
    descending (projection extent can disagree with eigenvalue order), and
    each axis sign is fixed by making its largest-magnitude component
    positive. A cluster of identical points yields a zero-extent box with
    ``degenerate`` set.
    """
    pts = frame.points[np.asarray(cluster, dtype=np.int64)]
    centroid = pts.mean(axis=0)
    centered = pts - centroid
    cov = centered.T @ centered / len(pts)
    _, vecs = np.linalg.eigh(cov)
    axes = vecs[:, ::-1].T  # rows, descending eigenvalue
    proj = centered @ axes.T
    lo = proj.min(axis=0)
    hi = proj.max(axis=0)
    half = (hi - lo) / 2.0
    center = centroid + ((hi + lo) / 2.0) @ axes

    order = np.argsort(-half, kind="stable")
    axes, half = axes[order], half[order]
    flip = np.take_along_axis(axes, np.abs(axes).argmax(axis=1, keepdims=True), axis=1) < 0
    axes = np.where(flip, -axes, axes)
    return OrientedBoundingBox(center, axes, half, degenerate=bool(np.all(half == 0.0)))


def extract_features(bbox: OrientedBoundingBox) -> GeometricFeatures:
    """Geometric feature vector of a bounding box (edges are 2x half extents)."""
    return GeometricFeatures.from_edges(2.0 * bbox.half_extents)


def detection_cost(f_box: GeometricFeatures, f_prior, weights) -> float:
    """Weighted L1 distance between a candidate's features and the prior."""
    prior = f_prior.as_vector() if isinstance(f_prior, GeometricFeatures) else np.asarray(f_prior, dtype=np.float64)
    return float(np.abs(f_box.as_vector() - prior) @ np.asarray(weights, dtype=np.float64))


def detect_target(
    frame: PointCloudFrame, plane: PlaneModel, cfg: DetectionConfig
) -> Detection | None:
    """Run the full per-frame detection chain; absence of a target is None.

    Candidates above the cost threshold are discarded; among the rest the
    minimum-cost cluster wins, ties broken by larger point count and then by
    lower cluster index.
    """
    plane = normalize_plane(plane)
    indices = np.arange(len(frame), dtype=np.int64)

    keep = cfg.area.contains(frame.points)
    pts, indices = frame.points[keep], indices[keep]

    keep = plane_distances(pts, plane) > cfg.ground_margin
    pts, indices = pts[keep], indices[keep]

    subframe = frame.with_points(pts)
    clusters = dbscan(subframe, cfg.dbscan)

    best = None  # (cost, -size, cluster_index, cluster, bbox)
    for ci, cluster in enumerate(clusters):
        bbox = pca_bounding_box(subframe, cluster)
        cost = detection_cost(extract_features(bbox), cfg.feature_prior, cfg.feature_weights)
        if cost > cfg.cost_threshold:
            continue
        key = (cost, -len(cluster), ci)
        if best is None or key < best[:3]:
            best = (*key, cluster, bbox)
    if best is None:
        return None
    cost, _, _, cluster, bbox = best
    return Detection(
        points=frame.with_points(pts[cluster]),
        cost=cost,
        bbox=bbox,
        indices=indices[cluster],
    )
