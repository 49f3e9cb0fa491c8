"""Fluid property tables, Stokes-Einstein diffusion and bound-ratio reports."""

import os
from importlib import resources
from pathlib import Path

from .fluids import FluidRegistry, FluidSpec, RegistryError, default_registry
from .report import BoundReport, build_report
from .scan import (
    BoundRatioTransformer,
    ScanError,
    ScanQuantity,
    ScanResult,
    quantity_values,
    scan_minimum,
    ser_diffusion,
)
from .tables import (
    FluidTableError,
    IsoDataset,
    Mode,
    Phase,
    StateRecord,
    label_phases_by_density,
    load_datasets,
    parse_fluid_table,
)

FIXTURE_ENV = "TRANSPORT_BOUNDS_FIXTURES"


def fixture_dir() -> Path:
    """Bundled property fixtures, unless ``$TRANSPORT_BOUNDS_FIXTURES`` is set."""
    override = os.environ.get(FIXTURE_ENV)
    if override:
        return Path(override)
    return Path(str(resources.files("transport_bounds.thermo").joinpath("data/fixtures")))


__all__ = [
    "FIXTURE_ENV",
    "BoundRatioTransformer",
    "BoundReport",
    "FluidRegistry",
    "FluidSpec",
    "FluidTableError",
    "IsoDataset",
    "Mode",
    "Phase",
    "RegistryError",
    "ScanError",
    "ScanQuantity",
    "ScanResult",
    "StateRecord",
    "build_report",
    "default_registry",
    "fixture_dir",
    "label_phases_by_density",
    "load_datasets",
    "parse_fluid_table",
    "quantity_values",
    "scan_minimum",
    "ser_diffusion",
]
