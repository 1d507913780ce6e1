"""Gaussian-process model of a star-convex radial extent function.

The target contour is the radial function r(theta) in the body frame,
represented by its values at N fixed test angles. A periodic kernel

    k(t, t') = signal_std^2 * exp(-2 sin^2((t - t') / 2) / length_scale^2)
               + mean_radius_std^2

defines the prior over r; regression against the test-angle values gives the
radius (and its residual variance) at any angle. The constant kernel term
models shared uncertainty in the mean radius, and the observation noise
``noise_std`` regularizes the Gram matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import cho_factor, cho_solve


def default_test_angles(count: int = 10) -> tuple[float, ...]:
    """``count`` equally spaced body-frame angles starting at 0."""
    return tuple(2.0 * math.pi * k / count for k in range(count))


@dataclass(frozen=True)
class GpConfig:
    """Hyperparameters of the radial extent model (all lengths in meters)."""

    test_angles: tuple[float, ...] = field(default_factory=default_test_angles)
    signal_std: float = 0.01
    mean_radius_std: float = 0.005
    noise_std: float = 0.001
    length_scale: float = math.pi / 6.0
    forgetting: float = 0.001

    def __post_init__(self):
        angles = tuple(float(a) for a in self.test_angles)
        object.__setattr__(self, "test_angles", angles)
        if any(not (0.0 <= a < 2.0 * math.pi) for a in angles) or any(
            a2 <= a1 for a1, a2 in zip(angles, angles[1:])
        ):
            raise ValueError("test_angles must be strictly increasing within [0, 2*pi)")
        for name in ("signal_std", "mean_radius_std", "noise_std", "length_scale", "forgetting"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def num_angles(self) -> int:
        return len(self.test_angles)


def gp_kernel(theta1, theta2, cfg: GpConfig) -> np.ndarray | float:
    """Periodic covariance (m^2) between contour angles; broadcasts over arrays."""
    delta = np.asarray(theta1, dtype=np.float64) - np.asarray(theta2, dtype=np.float64)
    se = cfg.signal_std**2 * np.exp(-2.0 * np.sin(delta / 2.0) ** 2 / cfg.length_scale**2)
    out = se + cfg.mean_radius_std**2
    return float(out) if np.ndim(out) == 0 else out


def _kernel_derivative(theta1, theta2, cfg: GpConfig) -> np.ndarray:
    """d k(t, t') / d t; the constant term drops out."""
    delta = np.asarray(theta1, dtype=np.float64) - np.asarray(theta2, dtype=np.float64)
    se = cfg.signal_std**2 * np.exp(-2.0 * np.sin(delta / 2.0) ** 2 / cfg.length_scale**2)
    return se * (-np.sin(delta) / cfg.length_scale**2)


@lru_cache(maxsize=8)
def _gram_ops(cfg: GpConfig):
    angles = np.array(cfg.test_angles)
    gram = gp_kernel(angles[:, None], angles[None, :], cfg)
    chol = cho_factor(gram + cfg.noise_std**2 * np.eye(len(angles)))
    return angles, gram, chol


def gram_matrix(cfg: GpConfig) -> np.ndarray:
    """Kernel Gram matrix over the test angles (no observation noise)."""
    return _gram_ops(cfg)[1].copy()


def gp_regressor(theta, cfg: GpConfig) -> tuple[np.ndarray, np.ndarray]:
    """Regression weights and residual variance at angle(s) theta.

    Returns ``(weights, residual_var)`` where ``weights`` has shape
    (..., num_angles) and ``weights @ radii`` is the regressed radius at
    theta. The residual variance is clamped at 0.
    """
    angles, _, chol = _gram_ops(cfg)
    theta = np.asarray(theta, dtype=np.float64)
    k_vec = gp_kernel(theta[..., None], angles, cfg)
    weights = cho_solve(chol, k_vec.reshape(-1, len(angles)).T).T.reshape(k_vec.shape)
    resid = gp_kernel(theta, theta, cfg) - np.sum(weights * k_vec, axis=-1)
    return weights, np.maximum(resid, 0.0)


def gp_regressor_gradient(theta, cfg: GpConfig) -> np.ndarray:
    """d weights / d theta, used for the measurement Jacobian."""
    angles, _, chol = _gram_ops(cfg)
    theta = np.asarray(theta, dtype=np.float64)
    dk = _kernel_derivative(theta[..., None], angles, cfg)
    return cho_solve(chol, dk.reshape(-1, len(angles)).T).T.reshape(dk.shape)


def ellipse_radius(theta, length: float, width: float) -> np.ndarray | float:
    """Radius of the ellipse with diameters (length, width) at body angle theta."""
    a, b = length / 2.0, width / 2.0
    theta = np.asarray(theta, dtype=np.float64)
    out = a * b / np.hypot(b * np.cos(theta), a * np.sin(theta))
    return float(out) if np.ndim(out) == 0 else out


def rectangle_radius(theta, length: float, width: float) -> np.ndarray | float:
    """Radius of the centered length x width rectangle at body angle theta."""
    hx, hy = length / 2.0, width / 2.0
    theta = np.asarray(theta, dtype=np.float64)
    with np.errstate(divide="ignore"):
        rx = np.where(np.cos(theta) != 0.0, hx / np.abs(np.cos(theta)), np.inf)
        ry = np.where(np.sin(theta) != 0.0, hy / np.abs(np.sin(theta)), np.inf)
    out = np.minimum(rx, ry)
    return float(out) if np.ndim(out) == 0 else out
