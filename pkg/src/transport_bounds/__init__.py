"""Planckian bounds on transport: MD trajectories, Green-Kubo analysis and fluid-data audits."""

from . import bounds, mdsim, thermo, units, vacf
from .bounds import BoundSet, evaluate_bounds
from .units import CONSTANT_SET_VERSION, CONSTANTS
from .vacf import TransportEstimate, VACFEstimator, Vacf, analyze

__version__ = "0.1.0"

__all__ = [
    "bounds",
    "mdsim",
    "thermo",
    "units",
    "vacf",
    "BoundSet",
    "evaluate_bounds",
    "CONSTANT_SET_VERSION",
    "CONSTANTS",
    "TransportEstimate",
    "VACFEstimator",
    "Vacf",
    "analyze",
]
