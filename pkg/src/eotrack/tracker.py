"""Extended-object tracker: constant-velocity prediction plus an iterated EKF
update against a star-convex GP contour model.

The augmented state stacks planar pose, its rates, and the radial extent
values at the GP test angles:

    [x, y, heading, vx, vy, turn_rate, r_0 ... r_{N-1}]

Tracking runs in a 2D chart of the estimated ground plane; 3D target points
are orthogonally projected into that chart before the update. Measurements are
assumed to originate from the contour, so a per-angular-bin outer band is
extracted around the predicted center first.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .gp import GpConfig, ellipse_radius, gp_regressor, gp_regressor_gradient, gram_matrix
from .ground import PlaneModel, normalize_plane
from .pointcloud import PointCloudFrame

KINEMATIC_DIM = 6
MIN_RADIUS = 0.01
PSD_EIG_TOLERANCE = -1e-9

# Weakly informative initial kinematic standard deviations.
INIT_POSITION_STD = 0.5
INIT_VELOCITY_STD = 0.5
INIT_HEADING_STD = math.pi / 4.0
INIT_TURN_RATE_STD = 0.5


class NumericalError(RuntimeError):
    """The filter produced a non-PSD covariance or a non-finite state."""


def wrap_angle(angle):
    """Wrap to the half-open interval (-pi, pi]."""
    return np.pi - (np.pi - np.asarray(angle)) % (2.0 * np.pi)


@dataclass(frozen=True)
class MotionConfig:
    """Constant-velocity motion model parameters.

    ``accel_noise`` is the continuous white-noise acceleration intensity
    (sqrt(m^2 s^-3)), applied identically to both translational axes and, in
    angular units, to the heading. ``meas_noise`` is the isotropic standard
    deviation (m) of a contour measurement. ``period`` is the nominal frame
    period; per-step calls may override it with the actual timestamp delta.
    """

    accel_noise: float = 0.05
    meas_noise: float = 0.1
    period: float = 1.0 / 4.4

    def __post_init__(self):
        if self.accel_noise <= 0 or self.meas_noise <= 0 or self.period <= 0:
            raise ValueError("motion parameters must be positive")


@dataclass(frozen=True)
class TargetState:
    """Immutable augmented state vector.

    Construction normalizes the invariants: the heading is wrapped to
    (-pi, pi] and every extent radius is clamped to at least MIN_RADIUS.
    """

    vector: np.ndarray

    def __post_init__(self):
        vec = np.array(np.asarray(self.vector, dtype=np.float64))
        if vec.ndim != 1 or len(vec) < KINEMATIC_DIM + 1:
            raise ValueError(f"state vector must be 1-D with >= {KINEMATIC_DIM + 1} entries")
        vec[2] = wrap_angle(vec[2])
        vec[KINEMATIC_DIM:] = np.maximum(vec[KINEMATIC_DIM:], MIN_RADIUS)
        vec.flags.writeable = False
        object.__setattr__(self, "vector", vec)

    @property
    def x(self) -> float:
        return float(self.vector[0])

    @property
    def y(self) -> float:
        return float(self.vector[1])

    @property
    def heading(self) -> float:
        return float(self.vector[2])

    @property
    def vx(self) -> float:
        return float(self.vector[3])

    @property
    def vy(self) -> float:
        return float(self.vector[4])

    @property
    def turn_rate(self) -> float:
        return float(self.vector[5])

    @property
    def radii(self) -> np.ndarray:
        return self.vector[KINEMATIC_DIM:]

    @property
    def dim(self) -> int:
        return len(self.vector)


def ensure_psd(cov: np.ndarray) -> tuple[np.ndarray, float]:
    """Symmetrize and project a covariance onto the PSD cone.

    Returns the projected matrix and the smallest pre-projection eigenvalue;
    raises NumericalError when that eigenvalue is below PSD_EIG_TOLERANCE.
    """
    sym = (cov + cov.T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(sym)
    min_eig = float(eigvals[0])
    if not np.isfinite(min_eig):
        raise NumericalError("covariance contains non-finite entries")
    if min_eig < PSD_EIG_TOLERANCE:
        raise NumericalError(f"covariance lost positive semidefiniteness (min eig {min_eig:.3e})")
    if min_eig < 0.0:
        sym = (eigvecs * np.maximum(eigvals, 0.0)) @ eigvecs.T
        sym = (sym + sym.T) / 2.0
    return sym, min_eig


def initialize_state(
    prior_dims: tuple[float, float], start_pos, cfg: GpConfig
) -> tuple[TargetState, np.ndarray]:
    """Prior state and covariance from the target's known footprint.

    The extent prior is the ellipse with the footprint's length and width as
    diameters, evaluated at the test angles; its covariance block is the
    kernel Gram matrix. Velocities and heading start at zero.
    """
    length, width = float(prior_dims[0]), float(prior_dims[1])
    if length <= 0 or width <= 0:
        raise ValueError("prior dimensions must be positive")
    angles = np.array(cfg.test_angles)
    radii = ellipse_radius(angles, length, width)
    vec = np.concatenate([[float(start_pos[0]), float(start_pos[1]), 0.0, 0.0, 0.0, 0.0], radii])

    n = KINEMATIC_DIM + cfg.num_angles
    cov = np.zeros((n, n))
    cov[0, 0] = cov[1, 1] = INIT_POSITION_STD**2
    cov[2, 2] = INIT_HEADING_STD**2
    cov[3, 3] = cov[4, 4] = INIT_VELOCITY_STD**2
    cov[5, 5] = INIT_TURN_RATE_STD**2
    cov[KINEMATIC_DIM:, KINEMATIC_DIM:] = gram_matrix(cfg)
    return TargetState(vec), cov


def predict(
    state: TargetState,
    cov: np.ndarray,
    motion: MotionConfig,
    gp: GpConfig,
    dt: float | None = None,
) -> tuple[TargetState, np.ndarray]:
    """Constant-velocity prediction with extent forgetting.

    Kinematics follow the discretized white-noise-acceleration model with
    process-noise blocks [[T^3/3, T^2/2], [T^2/2, T]] * accel_noise^2 per
    (position, rate) pair, heading included. The extent mean is left alone
    while its covariance reverts toward the prior Gram matrix by the
    forgetting factor, and kinematics/extent cross terms shrink accordingly.
    """
    T = motion.period if dt is None else float(dt)
    if T < 0:
        raise ValueError("time step must be non-negative")
    n = state.dim
    nf = n - KINEMATIC_DIM

    F = np.eye(n)
    F[0, 3] = F[1, 4] = F[2, 5] = T
    vec = F @ state.vector

    q = motion.accel_noise**2
    cov = F @ cov @ F.T
    for pos, rate in ((0, 3), (1, 4), (2, 5)):
        cov[pos, pos] += q * T**3 / 3.0
        cov[pos, rate] += q * T**2 / 2.0
        cov[rate, pos] += q * T**2 / 2.0
        cov[rate, rate] += q * T

    eta = gp.forgetting
    k = KINEMATIC_DIM
    cov[k:, k:] += eta * (gram_matrix(gp) - cov[k:, k:])
    cov[:k, k:] *= 1.0 - eta
    cov[k:, :k] *= 1.0 - eta

    cov, _ = ensure_psd(cov)
    if nf != gp.num_angles:
        raise ValueError("state extent size does not match the GP configuration")
    return TargetState(vec), cov


def extract_contour_measurements(
    measurements: np.ndarray, predicted_center, bins: int = 36, band: float = 0.01
) -> np.ndarray:
    """Keep the radially outermost band of points per angular bin.

    Points are binned by polar angle about the predicted center into ``bins``
    equal sectors; within each non-empty sector every point whose radius is
    within ``band`` meters of the sector maximum survives.
    """
    if bins < 4:
        raise ValueError("bins must be >= 4")
    pts = np.asarray(measurements, dtype=np.float64).reshape(-1, 2)
    if len(pts) == 0:
        return pts
    center = np.asarray(predicted_center, dtype=np.float64)
    offset = pts - center
    radius = np.hypot(offset[:, 0], offset[:, 1])
    angle = np.arctan2(offset[:, 1], offset[:, 0])
    idx = np.minimum(((angle + np.pi) / (2.0 * np.pi / bins)).astype(np.int64), bins - 1)
    max_radius = np.full(bins, -np.inf)
    np.maximum.at(max_radius, idx, radius)
    return pts[radius >= max_radius[idx] - band]


def _contour_model(vector: np.ndarray, measurements: np.ndarray, gp: GpConfig,
                   angle_jacobian: bool = False):
    """Stacked predicted contour points and Jacobian at one state.

    Angle association is frozen per evaluation: the global angle of each
    measurement is computed from the current center and treated as fixed while
    differentiating, unless ``angle_jacobian`` asks for the atan2 terms too.
    Measurements coinciding with the center are skipped with a warning.
    Returns ``(z_stacked, zhat_stacked, H)`` with rows interleaved x, y.
    """
    center = vector[:2]
    heading = vector[2]
    radii = vector[KINEMATIC_DIM:]
    offset = measurements - center
    rho_sq = np.einsum("ij,ij->i", offset, offset)
    ok = rho_sq > 1e-18
    if not ok.all():
        warnings.warn(f"skipped {int((~ok).sum())} measurement(s) at the predicted center")
        measurements = measurements[ok]
        offset = offset[ok]
        rho_sq = rho_sq[ok]
    m = len(measurements)
    n = len(vector)

    phi = np.arctan2(offset[:, 1], offset[:, 0])
    theta = wrap_angle(phi - heading)
    weights, _ = gp_regressor(theta, gp)          # (m, N)
    radius = weights @ radii                      # (m,)
    d_weights = gp_regressor_gradient(theta, gp)  # (m, N)
    d_radius = d_weights @ radii

    u = np.stack([np.cos(phi), np.sin(phi)], axis=1)     # (m, 2)
    zhat = center + radius[:, None] * u

    H = np.zeros((2 * m, n))
    H[0::2, 0] = 1.0
    H[1::2, 1] = 1.0
    H[0::2, 2] = -d_radius * u[:, 0]
    H[1::2, 2] = -d_radius * u[:, 1]
    H[0::2, KINEMATIC_DIM:] = u[:, 0:1] * weights
    H[1::2, KINEMATIC_DIM:] = u[:, 1:2] * weights
    if angle_jacobian:
        u_perp = np.stack([-u[:, 1], u[:, 0]], axis=1)
        dz_dphi = d_radius[:, None] * u + radius[:, None] * u_perp  # (m, 2)
        dphi_dx = offset[:, 1] / rho_sq
        dphi_dy = -offset[:, 0] / rho_sq
        H[0::2, 0] += dz_dphi[:, 0] * dphi_dx
        H[1::2, 0] += dz_dphi[:, 1] * dphi_dx
        H[0::2, 1] += dz_dphi[:, 0] * dphi_dy
        H[1::2, 1] += dz_dphi[:, 1] * dphi_dy
    return measurements.reshape(-1), zhat.reshape(-1), H


def measurement_model(
    state: TargetState, z, gp: GpConfig, angle_jacobian: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """Predicted contour point and Jacobian for a single 2D measurement."""
    z = np.asarray(z, dtype=np.float64).reshape(1, 2)
    _, zhat, H = _contour_model(state.vector, z, gp, angle_jacobian)
    if len(zhat) == 0:
        raise ValueError("measurement coincides with the predicted center")
    return zhat, H


def _state_diff(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a - b
    diff[2] = wrap_angle(diff[2])
    return diff


def iterated_kalman_update(
    x: np.ndarray,
    cov: np.ndarray,
    model,
    noise_var: float,
    max_iter: int = 10,
    tol: float = 1e-6,
    state_diff=None,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Generic iterated EKF update with relinearization at each iterate.

    ``model(x_i)`` must return the stacked measurement vector, its prediction,
    and the Jacobian at ``x_i``; the measurement noise is ``noise_var`` times
    identity. The gain is formed in information form (the innovation matrix is
    never built), and the posterior covariance uses the Joseph form at the
    final iterate. With a linear model the iteration is exact after one step.
    """
    if state_diff is None:
        state_diff = lambda a, b: a - b
    x_pred = np.array(x, dtype=np.float64)
    try:
        cov_chol = cho_factor((cov + cov.T) / 2.0)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"predicted covariance is not invertible: {exc}") from exc
    cov_inv = cho_solve(cov_chol, np.eye(len(x_pred)))

    x_i = x_pred.copy()
    n_iter = 0
    K = H = None
    for _ in range(max_iter):
        z, zhat, H = model(x_i)
        info = cov_inv + (H.T @ H) / noise_var
        try:
            info_chol = cho_factor(info)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"innovation information matrix not invertible: {exc}") from exc
        K = cho_solve(info_chol, H.T) / noise_var
        innovation = z - zhat - H @ state_diff(x_pred, x_i)
        x_next = x_pred + K @ innovation
        step = float(np.linalg.norm(state_diff(x_next, x_i)))
        x_i = x_next
        n_iter += 1
        if step < tol:
            break
    if not np.isfinite(x_i).all():
        raise NumericalError("state update diverged to non-finite values")

    joseph = np.eye(len(x_pred)) - K @ H
    cov_post = joseph @ cov @ joseph.T + noise_var * (K @ K.T)
    return x_i, cov_post, n_iter


def iekf_update(
    state: TargetState,
    cov: np.ndarray,
    measurements: np.ndarray,
    motion: MotionConfig,
    gp: GpConfig,
    max_iter: int = 10,
    tol: float = 1e-6,
    angle_jacobian: bool = False,
) -> tuple[TargetState, np.ndarray]:
    """Iterated EKF update with the stacked star-convex contour model.

    An empty measurement set is the identity update. The posterior heading is
    wrapped and radii clamped by TargetState; the covariance is symmetrized
    and PSD-projected after the Joseph form.
    """
    meas = np.asarray(measurements, dtype=np.float64).reshape(-1, 2)
    if len(meas) == 0:
        return state, cov

    def model(vec):
        return _contour_model(vec, meas, gp, angle_jacobian)

    x_post, cov_post, _ = iterated_kalman_update(
        state.vector, cov, model, motion.meas_noise**2, max_iter, tol, state_diff=_state_diff
    )
    cov_post, _ = ensure_psd(cov_post)
    return TargetState(x_post), cov_post


def plane_basis(plane: PlaneModel) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Deterministic 2D chart of a plane: (origin, u, v).

    The basis is built from the normal with its dominant component made
    positive first, so near-vertical planes do not flip the chart when a tiny
    coefficient changes sign. ``u`` is the Gram-Schmidt projection of the
    world x axis (y axis when the normal is x-dominant) and v completes the
    right-handed pair n' x u. The origin is the projection of the sensor
    origin onto the plane.
    """
    plane = normalize_plane(plane)
    n = plane.normal
    dominant = int(np.argmax(np.abs(n)))
    if n[dominant] < 0:
        n = -n
    helper = np.zeros(3)
    helper[1 if dominant == 0 else 0] = 1.0
    u = helper - (helper @ n) * n
    u = u / np.linalg.norm(u)
    v = np.cross(n, u)
    origin = -plane.d * plane.normal
    return origin, u, v


def project_to_tracking_plane(points, plane: PlaneModel) -> np.ndarray:
    """Orthogonally project 3D points onto the plane's 2D chart.

    Accepts a PointCloudFrame or an (N, 3) array and returns (N, 2)
    coordinates in the deterministic basis of ``plane_basis``.
    """
    pts = points.points if isinstance(points, PointCloudFrame) else np.asarray(points, dtype=np.float64)
    pts = pts.reshape(-1, 3)
    plane = normalize_plane(plane)
    origin, u, v = plane_basis(plane)
    signed = pts @ plane.normal + plane.d
    on_plane = pts - signed[:, None] * plane.normal
    rel = on_plane - origin
    return np.stack([rel @ u, rel @ v], axis=1)


@dataclass
class TrackRecord:
    """One line of the track log."""

    t: float
    state: TargetState
    cov_diag: np.ndarray
    detected: bool


@dataclass
class GpTracker:
    """Sequential track over one target; ``step`` must be called in time order.

    Holds the posterior state and covariance, appends a TrackRecord per step,
    and tracks the smallest pre-projection covariance eigenvalue seen as a
    numerical health indicator.
    """

    state: TargetState
    cov: np.ndarray
    motion: MotionConfig
    gp: GpConfig
    t: float = 0.0
    contour_bins: int = 36
    contour_band: float = 0.01
    max_iter: int = 10
    tol: float = 1e-6
    angle_jacobian: bool = False
    log: list[TrackRecord] = field(default_factory=list)
    min_eigenvalue: float = math.inf

    @classmethod
    def from_prior(cls, prior_dims, start_pos, motion: MotionConfig, gp: GpConfig,
                   t0: float = 0.0, **kwargs) -> "GpTracker":
        state, cov = initialize_state(prior_dims, start_pos, gp)
        return cls(state=state, cov=cov, motion=motion, gp=gp, t=t0, **kwargs)

    def _note_eig(self, cov: np.ndarray):
        eig = float(np.linalg.eigvalsh((cov + cov.T) / 2.0)[0])
        self.min_eigenvalue = min(self.min_eigenvalue, eig)

    def step(self, measurements: np.ndarray | None, dt: float) -> TargetState:
        """Predict over ``dt``; update when a measurement set is supplied."""
        self.state, self.cov = predict(self.state, self.cov, self.motion, self.gp, dt)
        self._note_eig(self.cov)
        detected = measurements is not None and len(measurements) > 0
        if detected:
            contour = extract_contour_measurements(
                measurements, (self.state.x, self.state.y), self.contour_bins, self.contour_band
            )
            self.state, self.cov = iekf_update(
                self.state, self.cov, contour, self.motion, self.gp,
                self.max_iter, self.tol, self.angle_jacobian,
            )
            self._note_eig(self.cov)
        self.t += dt
        self.log.append(TrackRecord(self.t, self.state, np.diag(self.cov).copy(), detected))
        return self.state


def track_step(tracker: GpTracker, measurements: np.ndarray | None, dt: float) -> GpTracker:
    """Functional wrapper over GpTracker.step for one predict/update cycle."""
    tracker.step(measurements, dt)
    return tracker
