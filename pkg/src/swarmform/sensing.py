"""Measurement models, Jacobians and Fisher information for camera and
LiDAR UAVs, plus the swarm-total FIM and its regularized log-determinant.

The camera projects the target into pixel coordinates through a yaw-only
rotation; the LiDAR measures (range, azimuth, pitch). Both Jacobians are
taken with respect to the target position, so each UAV's information
matrix is O^T Q^-1 O with the sensor's measurement covariance Q.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geom import DegenerateGeometryError, Formation, Pose, Sensor

_DEGENERATE = 1e-9

DEFAULT_EPS = 1e-6

# Defaults reproduce the published simulation setup: focal lengths 381 px
# and measurement sigmas (6, 6) px / (0.1 m, 0.02 rad, 0.015 rad). The
# covariance diagonals below are those sigmas squared; treating them as
# variances directly misses the published six-UAV log-det by ~3.4.
DEFAULT_CAMERA_SIGMAS = (6.0, 6.0)
DEFAULT_LIDAR_SIGMAS = (0.1, 0.02, 0.015)


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float = 381.0
    fy: float = 381.0
    cx: float = 320.0
    cy: float = 240.0
    #: diagonal of the 2x2 pixel-noise covariance, px^2
    noise_cov: tuple[float, float] = tuple(s * s for s in DEFAULT_CAMERA_SIGMAS)

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if any(v <= 0 for v in self.noise_cov):
            raise ValueError("camera noise variances must be positive")


@dataclass(frozen=True)
class LidarNoise:
    #: diagonal of the 3x3 covariance: range m^2, azimuth rad^2, pitch rad^2
    noise_cov: tuple[float, float, float] = tuple(s * s for s in DEFAULT_LIDAR_SIGMAS)

    def __post_init__(self):
        if any(v <= 0 for v in self.noise_cov):
            raise ValueError("lidar noise variances must be positive")


@dataclass(frozen=True)
class SensorModels:
    camera: CameraIntrinsics = field(default_factory=CameraIntrinsics)
    lidar: LidarNoise = field(default_factory=LidarNoise)


def _camera_depth(pose: Pose, target: np.ndarray) -> float:
    dx, dy, _ = pose.position - np.asarray(target, dtype=float)
    z = np.cos(pose.yaw) * dx + np.sin(pose.yaw) * dy
    if abs(z) < _DEGENERATE:
        raise DegenerateGeometryError("target lies in the camera's focal plane")
    return float(z)


def camera_project(pose: Pose, target: np.ndarray, intr: CameraIntrinsics) -> tuple[float, float]:
    """Noiseless pixel coordinates (u, v) of the target."""
    if pose.sensor is not Sensor.CAMERA:
        raise ValueError("camera_project requires a camera pose")
    dx, dy, dz = pose.position - np.asarray(target, dtype=float)
    c, s = np.cos(pose.yaw), np.sin(pose.yaw)
    z = _camera_depth(pose, target)
    u = -intr.fx * (c * dy - s * dx) / z + intr.cx
    v = -intr.fy * dz / z + intr.cy
    return float(u), float(v)


def camera_jacobian(pose: Pose, target: np.ndarray, intr: CameraIntrinsics) -> np.ndarray:
    """2x3 Jacobian of (u, v) with respect to the target position."""
    dx, dy, dz = pose.position - np.asarray(target, dtype=float)
    c, s = np.cos(pose.yaw), np.sin(pose.yaw)
    z = _camera_depth(pose, target)
    z2 = z * z
    return np.array([
        [-intr.fx * dy / z2, intr.fx * dx / z2, 0.0],
        [-intr.fy * c * dz / z2, -intr.fy * s * dz / z2, intr.fy / z],
    ])


def lidar_measure(pose: Pose, target: np.ndarray) -> tuple[float, float, float]:
    """Noiseless (range, azimuth, pitch) of the UAV relative to the target.

    Azimuth uses the full-quadrant atan2 form.
    """
    rel = pose.position - np.asarray(target, dtype=float)
    d = float(np.linalg.norm(rel))
    if d < _DEGENERATE:
        raise DegenerateGeometryError("UAV coincides with the target")
    beta = float(np.arctan2(rel[1], rel[0]))
    delta = float(np.arctan2(rel[2], np.hypot(rel[0], rel[1])))
    return d, beta, delta


def lidar_jacobian(pose: Pose, target: np.ndarray) -> np.ndarray:
    """3x3 Jacobian of (range, azimuth, pitch) with respect to the target."""
    dx, dy, dz = pose.position - np.asarray(target, dtype=float)
    d_xy = float(np.hypot(dx, dy))
    if d_xy < _DEGENERATE:
        raise DegenerateGeometryError("vertical alignment: azimuth undefined")
    d, beta, _ = lidar_measure(pose, target)
    d2 = d * d
    sb, cb = np.sin(beta), np.cos(beta)
    return np.array([
        [-dx / d, -dy / d, -dz / d],
        [sb / d_xy, -cb / d_xy, 0.0],
        [dz * cb / d2, dz * sb / d2, -d_xy / d2],
    ])


def uav_fim(pose: Pose, target: np.ndarray, models: SensorModels) -> np.ndarray:
    """3x3 information matrix a single UAV contributes about the target."""
    if pose.sensor is Sensor.CAMERA:
        jac = camera_jacobian(pose, target, models.camera)
        inv_var = 1.0 / np.asarray(models.camera.noise_cov)
    else:
        jac = lidar_jacobian(pose, target)
        inv_var = 1.0 / np.asarray(models.lidar.noise_cov)
    return (jac.T * inv_var) @ jac


def total_fim(formation: Formation, models: SensorModels) -> np.ndarray:
    """Sum of per-UAV FIMs, in member order (deterministic reduction)."""
    out = np.zeros((3, 3))
    for pose in formation.poses:
        out += uav_fim(pose, formation.target, models)
    return out


def logdet_reg(fim: np.ndarray, eps: float = DEFAULT_EPS) -> float:
    """log det(F + eps*I), via a symmetric (Cholesky-backed) factorization.

    The regularizer keeps single-sensor subsets finite: a lone camera
    contributes a rank-2 FIM whose raw determinant is zero.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    sign, val = np.linalg.slogdet(fim + eps * np.eye(3))
    if sign <= 0:
        raise FloatingPointError("regularized FIM is not positive definite")
    return float(val)
