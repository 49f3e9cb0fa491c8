"""Pooled moments of per-particle local potential and kinetic energies."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MIN_POOLED_SAMPLES = 100


class InsufficientStatisticsError(ValueError):
    pass


@dataclass(frozen=True)
class MomentStats:
    """Moments of the local potential ``V_i`` and kinetic energy ``K_i``.

    All energies are in the units of the input samples (reduced units for
    MD trajectories, joules for SI samples).
    """

    mean_Vi: float
    var_Vi: float
    fourth_Vi: float
    mean_Ki: float
    sigma_Vi: float
    n_samples: int

    def __post_init__(self):
        if self.var_Vi < 0 or self.fourth_Vi < 0:
            raise ValueError("central moments must be non-negative")
        # Jensen: <x^4> >= <x^2>^2, exact for the pooled sample moments
        if self.fourth_Vi < self.var_Vi**2 * (1.0 - 1e-12):
            raise ValueError("fourth moment below squared variance")

    @property
    def kurtosis(self) -> float:
        return self.fourth_Vi / self.var_Vi**2


def moment_stats_from_samples(local_potentials, kinetic=None) -> MomentStats:
    """Pool ``V_i`` (and optionally ``K_i``) samples over every axis.

    Parameters
    ----------
    local_potentials : array_like
        Samples of ``V_i``; any shape, e.g. ``(n_samples, n_particles)``.
    kinetic : array_like, optional
        Samples of ``K_i``. ``mean_Ki`` is NaN when omitted.
    """
    v = np.asarray(local_potentials, dtype=float).ravel()
    if v.size < MIN_POOLED_SAMPLES:
        raise InsufficientStatisticsError(
            f"need at least {MIN_POOLED_SAMPLES} pooled samples, got {v.size}"
        )
    if not np.all(np.isfinite(v)):
        raise ValueError("local potentials contain non-finite values")
    mean = float(v.mean())
    dv2 = (v - mean) ** 2
    var = float(dv2.mean())
    fourth = float((dv2 * dv2).mean())
    mean_k = float(np.mean(kinetic)) if kinetic is not None else float("nan")
    return MomentStats(
        mean_Vi=mean,
        var_Vi=var,
        fourth_Vi=fourth,
        mean_Ki=mean_k,
        sigma_Vi=float(np.sqrt(var)),
        n_samples=int(v.size),
    )


def moment_stats(traj) -> MomentStats:
    """Moments pooled over particles and samples of a :class:`Trajectory`."""
    if traj.local_potentials is None or traj.kinetic_per_particle is None:
        raise ValueError("trajectory lacks local potentials or kinetic energies")
    return moment_stats_from_samples(traj.local_potentials, traj.kinetic_per_particle)


def sample_harmonic_potentials(temperature, n_samples, stiffness=1.0, seed=0, kB=1.0):
    """Canonical samples of ``V = k x^2 / 2`` for a 1D harmonic oscillator.

    Returns ``(V, K)`` arrays of length ``n_samples``. The kinetic samples
    are drawn independently from the Maxwell-Boltzmann distribution (unit
    mass), so ``<K> = kB T / 2``.
    """
    if not temperature > 0 or not stiffness > 0:
        raise ValueError("temperature and stiffness must be positive")
    rng = np.random.default_rng(seed)
    kT = kB * temperature
    x = rng.standard_normal(n_samples) * np.sqrt(kT / stiffness)
    p = rng.standard_normal(n_samples) * np.sqrt(kT)
    return 0.5 * stiffness * x * x, 0.5 * p * p
