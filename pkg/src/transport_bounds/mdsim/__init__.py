"""Compact molecular dynamics for Lennard-Jones and magnetized 2D Yukawa systems."""

from .config import (
    ConfigError,
    Langevin,
    LennardJones,
    NoThermostat,
    SimConfig,
    VelocityRescale,
    Yukawa,
)
from .engine import SimulationBlowUp, State, equilibrate, init_state, run, step
from .moments import (
    InsufficientStatisticsError,
    MomentStats,
    moment_stats,
    moment_stats_from_samples,
    sample_harmonic_potentials,
)
from .trajectory import Trajectory, TrajectoryFormatError, read_trajectory, write_trajectory

__all__ = [
    "ConfigError",
    "Langevin",
    "LennardJones",
    "NoThermostat",
    "SimConfig",
    "VelocityRescale",
    "Yukawa",
    "SimulationBlowUp",
    "State",
    "equilibrate",
    "init_state",
    "run",
    "step",
    "InsufficientStatisticsError",
    "MomentStats",
    "moment_stats",
    "moment_stats_from_samples",
    "sample_harmonic_potentials",
    "Trajectory",
    "TrajectoryFormatError",
    "read_trajectory",
    "write_trajectory",
]
