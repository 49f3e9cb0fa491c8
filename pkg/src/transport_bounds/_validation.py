"""Input validation helpers shared by the estimators."""

from __future__ import annotations

import math

import numpy as np


def check_positive(name: str, value) -> float:
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise ValueError(f"{name} must be positive and finite, got {value!r}")
    return value


def check_velocities(v) -> np.ndarray:
    """Coerce to a finite float array shaped ``(n_samples, n_particles, d)``."""
    v = np.asarray(v, dtype=float)
    if v.ndim == 1:
        v = v[:, None, None]
    elif v.ndim == 2:
        v = v[:, :, None]
    if v.ndim != 3:
        raise ValueError("velocities must be (n_samples, n_particles, d)")
    if v.shape[0] < 3:
        raise ValueError("need at least 3 samples")
    if not np.all(np.isfinite(v)):
        raise ValueError("velocities contain non-finite values")
    return v


def check_trajectory_like(traj, sample_interval: float = 1.0):
    """Return ``(velocities, dt)`` from a Trajectory or a bare array."""
    if hasattr(traj, "velocities") and hasattr(traj, "times"):
        if traj.velocities.size == 0 or traj.velocities.shape[0] < 3:
            raise ValueError("trajectory is empty or too short")
        return check_velocities(traj.velocities), float(traj.times[1] - traj.times[0])
    return check_velocities(traj), check_positive("sample_interval", sample_interval)
