"""Fluid identities: molar mass and kinetic diameter from a versioned registry."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..units import Quantity, convert, molecular_mass


class RegistryError(KeyError):
    """Registry file unreadable, malformed, or missing a requested fluid."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


@dataclass(frozen=True)
class FluidSpec:
    name: str
    molar_mass: float  # kg/mol
    kinetic_diameter: float  # m
    long_name: str = ""

    def __post_init__(self):
        if not self.molar_mass > 0:
            raise ValueError(f"{self.name}: molar_mass must be positive")
        if not self.kinetic_diameter > 0:
            raise ValueError(f"{self.name}: kinetic_diameter must be positive")

    @property
    def radius(self) -> float:
        """Molecular radius R used in the Stokes-Einstein relation."""
        return 0.5 * self.kinetic_diameter

    @property
    def mass(self) -> float:
        return molecular_mass(self.molar_mass)


class FluidRegistry:
    """Ordered mapping of fluid symbol to :class:`FluidSpec`.

    Iteration order follows the registry file, which fixes the row order of
    generated reports.
    """

    def __init__(self, fluids: dict[str, FluidSpec], version: str = "unversioned"):
        self._fluids = dict(fluids)
        self.version = version

    def __getitem__(self, key: str) -> FluidSpec:
        try:
            return self._fluids[key]
        except KeyError:
            raise RegistryError(f"fluid {key!r} is not in the registry") from None

    def __contains__(self, key) -> bool:
        return key in self._fluids

    def __iter__(self):
        return iter(self._fluids)

    def __len__(self):
        return len(self._fluids)

    def order(self, key: str) -> int:
        return list(self._fluids).index(key)

    @classmethod
    def from_json(cls, path) -> "FluidRegistry":
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise RegistryError(f"cannot read registry {path}: {exc}") from None
        return cls._from_raw(raw, str(path))

    @classmethod
    def _from_raw(cls, raw, origin: str) -> "FluidRegistry":
        try:
            units = raw.get("units", {})
            d_unit = units.get("kinetic_diameter", "m")
            fluids = {}
            for key, entry in raw["fluids"].items():
                diameter = convert(Quantity(float(entry["kinetic_diameter"]), d_unit), "m").value
                fluids[key] = FluidSpec(
                    name=key,
                    molar_mass=float(entry["molar_mass"]),
                    kinetic_diameter=diameter,
                    long_name=entry.get("name", ""),
                )
        except (KeyError, TypeError, AttributeError, ValueError) as exc:
            raise RegistryError(f"malformed registry {origin}: {exc}") from None
        return cls(fluids, version=str(raw.get("registry_version", "unversioned")))


def default_registry() -> FluidRegistry:
    """The bundled kinetic-diameter registry."""
    src = resources.files("transport_bounds.thermo").joinpath("data/kinetic_diameters.json")
    return FluidRegistry._from_raw(json.loads(src.read_text()), "bundled registry")
