"""
Physical constants, tagged quantities and unit conversion.

Constants are the CODATA 2018 recommended values. Since the 2019 SI
redefinition ``h``, ``kB`` and ``NA`` are exact; only the atomic mass
constant carries an uncertainty.

Tagged :class:`Quantity` objects are used at module boundaries (file
parsing, reports). Numerical kernels work on plain floats in SI or reduced
units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "PhysicalConstants",
    "CONSTANTS",
    "CONSTANT_SET_VERSION",
    "Dimension",
    "Quantity",
    "DimensionError",
    "convert",
    "planckian_time",
    "thermal_de_broglie",
    "molecular_mass",
]

CONSTANT_SET_VERSION = "CODATA-2018"


class DimensionError(ValueError):
    """Raised when quantities of incompatible dimensions are combined."""


@dataclass(frozen=True)
class PhysicalConstants:
    """Immutable set of SI constants.

    Attributes
    ----------
    hbar : float
        Reduced Planck constant, J s.
    h : float
        Planck constant, J s.
    kB : float
        Boltzmann constant, J/K.
    amu : float
        Atomic mass constant, kg.
    NA : float
        Avogadro constant, 1/mol.
    """

    hbar: float
    h: float
    kB: float
    amu: float
    NA: float

    def __post_init__(self):
        for name in ("hbar", "h", "kB", "amu", "NA"):
            if not getattr(self, name) > 0:
                raise ValueError(f"constant {name} must be positive")
        if abs(self.h - 2.0 * math.pi * self.hbar) > 1e-12 * self.h:
            raise ValueError("h and hbar are inconsistent")


_H = 6.62607015e-34
CONSTANTS = PhysicalConstants(
    hbar=_H / (2.0 * math.pi),
    h=_H,
    kB=1.380649e-23,
    amu=1.66053906660e-27,
    NA=6.02214076e23,
)


class Dimension(str, Enum):
    TIME = "time"
    LENGTH = "length"
    MASS = "mass"
    TEMPERATURE = "temperature"
    PRESSURE = "pressure"
    VISCOSITY = "viscosity"
    DIFFUSIVITY = "diffusivity"
    NUMBER_DENSITY = "number-density"
    MASS_DENSITY = "mass-density"
    MOLAR_DENSITY = "molar-density"
    ENERGY = "energy"


# unit symbol -> (dimension, factor to the SI unit of that dimension)
UNITS: dict[str, tuple[Dimension, float]] = {
    "s": (Dimension.TIME, 1.0),
    "ps": (Dimension.TIME, 1e-12),
    "fs": (Dimension.TIME, 1e-15),
    "m": (Dimension.LENGTH, 1.0),
    "nm": (Dimension.LENGTH, 1e-9),
    "A": (Dimension.LENGTH, 1e-10),
    "kg": (Dimension.MASS, 1.0),
    "g": (Dimension.MASS, 1e-3),
    "amu": (Dimension.MASS, CONSTANTS.amu),
    "K": (Dimension.TEMPERATURE, 1.0),
    "Pa": (Dimension.PRESSURE, 1.0),
    "kPa": (Dimension.PRESSURE, 1e3),
    "MPa": (Dimension.PRESSURE, 1e6),
    "bar": (Dimension.PRESSURE, 1e5),
    "atm": (Dimension.PRESSURE, 101325.0),
    "Pa*s": (Dimension.VISCOSITY, 1.0),
    "mPa*s": (Dimension.VISCOSITY, 1e-3),
    "uPa*s": (Dimension.VISCOSITY, 1e-6),
    "cP": (Dimension.VISCOSITY, 1e-3),
    "m2/s": (Dimension.DIFFUSIVITY, 1.0),
    "cm2/s": (Dimension.DIFFUSIVITY, 1e-4),
    "1/m3": (Dimension.NUMBER_DENSITY, 1.0),
    "kg/m3": (Dimension.MASS_DENSITY, 1.0),
    "g/cm3": (Dimension.MASS_DENSITY, 1e3),
    "g/ml": (Dimension.MASS_DENSITY, 1e3),
    "mol/m3": (Dimension.MOLAR_DENSITY, 1.0),
    "mol/l": (Dimension.MOLAR_DENSITY, 1e3),
    "J": (Dimension.ENERGY, 1.0),
    "eV": (Dimension.ENERGY, 1.602176634e-19),
}

_ALIASES = {
    "μpa*s": "uPa*s",
    "µpa*s": "uPa*s",
    "upa*s": "uPa*s",
    "upa.s": "uPa*s",
    "μpa.s": "uPa*s",
    "µpa.s": "uPa*s",
    "pa.s": "Pa*s",
    "mpa.s": "mPa*s",
    "mol/dm3": "mol/l",
    "m^2/s": "m2/s",
    "kg/m^3": "kg/m3",
    "1/m^3": "1/m3",
    "m^-3": "1/m3",
    "å": "A",
}


def canonical_unit(unit: str) -> str:
    """Return the registry spelling of ``unit`` or raise ``KeyError``."""
    u = unit.strip()
    if u in UNITS:
        return u
    low = u.lower()
    if low in _ALIASES:
        return _ALIASES[low]
    for key in UNITS:
        if key.lower() == low:
            return key
    raise KeyError(f"unknown unit {unit!r}")


@dataclass(frozen=True)
class Quantity:
    """A real value tagged with a unit from :data:`UNITS`."""

    value: float
    unit: str

    def __post_init__(self):
        object.__setattr__(self, "unit", canonical_unit(self.unit))

    @property
    def dimension(self) -> Dimension:
        return UNITS[self.unit][0]

    @property
    def si(self) -> float:
        return self.value * UNITS[self.unit][1]

    def _check(self, other: "Quantity") -> None:
        if not isinstance(other, Quantity):
            raise TypeError("can only combine Quantity with Quantity")
        if other.dimension is not self.dimension:
            raise DimensionError(
                f"cannot combine {self.dimension.value} with {other.dimension.value}"
            )

    def __add__(self, other: "Quantity") -> "Quantity":
        self._check(other)
        return Quantity(self.value + convert(other, self.unit).value, self.unit)

    def __sub__(self, other: "Quantity") -> "Quantity":
        self._check(other)
        return Quantity(self.value - convert(other, self.unit).value, self.unit)

    def __lt__(self, other: "Quantity") -> bool:
        self._check(other)
        return self.si < other.si

    def __le__(self, other: "Quantity") -> bool:
        self._check(other)
        return self.si <= other.si

    def __mul__(self, k: float) -> "Quantity":
        if isinstance(k, Quantity):
            raise DimensionError("products of tagged quantities are not supported")
        return Quantity(self.value * k, self.unit)

    __rmul__ = __mul__


def convert(q: Quantity, target_unit: str, molar_mass: float | None = None) -> Quantity:
    """Rescale ``q`` to ``target_unit``.

    Parameters
    ----------
    q : Quantity
        Source quantity.
    target_unit : str
        Unit symbol from :data:`UNITS`.
    molar_mass : float, optional
        Molar mass in kg/mol. Needed only to cross between mass, molar and
        number densities.

    Raises
    ------
    DimensionError
        If the dimensions differ and no density bridge applies.
    """
    target = canonical_unit(target_unit)
    src_dim, src_f = UNITS[q.unit]
    dst_dim, dst_f = UNITS[target]
    if src_dim is dst_dim:
        if q.unit == target:
            return Quantity(q.value, target)
        return Quantity(q.value * (src_f / dst_f), target)

    densities = (Dimension.MASS_DENSITY, Dimension.MOLAR_DENSITY, Dimension.NUMBER_DENSITY)
    if src_dim in densities and dst_dim in densities:
        if molar_mass is None or not molar_mass > 0:
            raise DimensionError("density conversion requires a positive molar_mass")
        # go through number density (1/m3)
        si = q.value * src_f
        if src_dim is Dimension.MASS_DENSITY:
            n = si * CONSTANTS.NA / molar_mass
        elif src_dim is Dimension.MOLAR_DENSITY:
            n = si * CONSTANTS.NA
        else:
            n = si
        if dst_dim is Dimension.MASS_DENSITY:
            out = n * molar_mass / CONSTANTS.NA
        elif dst_dim is Dimension.MOLAR_DENSITY:
            out = n / CONSTANTS.NA
        else:
            out = n
        return Quantity(out / dst_f, target)

    raise DimensionError(f"cannot convert {src_dim.value} to {dst_dim.value}")


def _positive(name: str, x: float) -> float:
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise ValueError(f"{name} must be positive and finite, got {x!r}")
    return x


def molecular_mass(molar_mass: float) -> float:
    """Mass of one molecule (kg) from a molar mass in kg/mol."""
    return _positive("molar_mass", molar_mass) / CONSTANTS.NA


def planckian_time(T: float) -> float:
    """hbar / (kB T) in seconds."""
    T = _positive("T", T)
    return CONSTANTS.hbar / (CONSTANTS.kB * T)


def thermal_de_broglie(m: float, T: float) -> float:
    """Thermal de Broglie length sqrt(2 pi hbar^2 / (m kB T)) in metres.

    Parameters
    ----------
    m : float
        Particle mass in kg.
    T : float
        Temperature in K.
    """
    m = _positive("m", m)
    T = _positive("T", T)
    return math.sqrt(2.0 * math.pi * CONSTANTS.hbar**2 / (m * CONSTANTS.kB * T))
