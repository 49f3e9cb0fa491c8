"""
Parsing of tabulated fluid-property exports into validated iso-scans.

Expected CSV shape (NIST-webbook-like)::

    # fluid: Ar                      (optional metadata lines)
    # mode: isobaric
    Temperature (K),Pressure (MPa),Density (mol/l),Viscosity (uPa*s),Phase
    83.81,0.101325,35.47,290.2,liquid

Units are declared in parentheses in each header cell. Unknown extra
columns are ignored.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from ..units import CONSTANTS, Dimension, Quantity, UNITS, canonical_unit, convert
from .fluids import FluidSpec

REL_TOL_FIXED = 1e-3
DENSITY_JUMP = 5.0


class FluidTableError(ValueError):
    pass


class Phase(str, Enum):
    LIQUID = "liquid"
    VAPOR = "vapor"
    SUPERCRITICAL = "supercritical"
    UNKNOWN = "unknown"

    @classmethod
    def parse(cls, label) -> "Phase":
        if isinstance(label, cls):
            return label
        if label is None or (isinstance(label, float) and np.isnan(label)):
            return cls.UNKNOWN
        s = str(label).strip().lower()
        aliases = {"gas": "vapor", "vapour": "vapor", "liq": "liquid", "": "unknown"}
        s = aliases.get(s, s)
        try:
            return cls(s)
        except ValueError:
            raise FluidTableError(f"unrecognised phase label {label!r}") from None


class Mode(str, Enum):
    ISOBARIC = "isobaric"
    ISOTHERMAL = "isothermal"


@dataclass(frozen=True)
class StateRecord:
    T: float  # K
    P: float  # MPa
    rho: float  # kg/m^3
    eta: float  # Pa s
    phase: Phase = Phase.UNKNOWN

    def __post_init__(self):
        for name in ("T", "P", "rho", "eta"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise FluidTableError(f"{name} must be positive and finite, got {v!r}")

    def number_density(self, molar_mass: float) -> float:
        return self.rho * CONSTANTS.NA / molar_mass


@dataclass(frozen=True)
class IsoDataset:
    """Records along one isobar or isotherm, sorted by the varying coordinate."""

    fluid: FluidSpec
    mode: Mode
    fixed_value: float
    records: tuple[StateRecord, ...]
    n_dropped: int = 0
    source: Optional[str] = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        mode = Mode(self.mode)
        object.__setattr__(self, "mode", mode)
        recs = tuple(self.records)
        object.__setattr__(self, "records", recs)
        if not recs:
            return
        fixed = np.array([self._fixed(r) for r in recs])
        bad = np.abs(fixed - self.fixed_value) > REL_TOL_FIXED * abs(self.fixed_value)
        if bad.any():
            i = int(np.argmax(bad))
            raise FluidTableError(
                f"{self.fluid.name}: {self.fixed_name} {fixed[i]:g} at record {i} differs from "
                f"{self.fixed_value:g} by more than {REL_TOL_FIXED:.1%}"
            )
        for a, b in zip(recs, recs[1:]):
            xa, xb = self._varying(a), self._varying(b)
            if xb < xa or (xb == xa and a.phase == b.phase):
                raise FluidTableError(
                    f"{self.fluid.name}: records must be strictly increasing in {self.varying_name} "
                    f"within a phase ({xa:g} then {xb:g})"
                )

    @property
    def fixed_name(self) -> str:
        return "pressure" if self.mode is Mode.ISOBARIC else "temperature"

    @property
    def varying_name(self) -> str:
        return "temperature" if self.mode is Mode.ISOBARIC else "pressure"

    def _fixed(self, r: StateRecord) -> float:
        return r.P if self.mode is Mode.ISOBARIC else r.T

    def _varying(self, r: StateRecord) -> float:
        return r.T if self.mode is Mode.ISOBARIC else r.P

    def __len__(self):
        return len(self.records)

    @property
    def phases(self) -> list[Phase]:
        seen = []
        for r in self.records:
            if r.phase not in seen:
                seen.append(r.phase)
        return seen

    def arrays(self) -> dict[str, np.ndarray]:
        return {
            "T": np.array([r.T for r in self.records]),
            "P": np.array([r.P for r in self.records]),
            "rho": np.array([r.rho for r in self.records]),
            "eta": np.array([r.eta for r in self.records]),
        }

    @property
    def label(self) -> str:
        unit = "MPa" if self.mode is Mode.ISOBARIC else "K"
        return f"{self.fluid.name}_{self.mode.value}_{self.fixed_value:g}{unit}"


_HEADER = re.compile(r"^\s*([A-Za-z_ ]+?)\s*(?:\((.*)\))?\s*$")
_REQUIRED = {
    "temperature": (Dimension.TEMPERATURE, "K"),
    "pressure": (Dimension.PRESSURE, "MPa"),
    "density": (None, "kg/m3"),
    "viscosity": (Dimension.VISCOSITY, "Pa*s"),
}
_DENSITY_DIMS = (Dimension.MASS_DENSITY, Dimension.MOLAR_DENSITY, Dimension.NUMBER_DENSITY)


def _column_map(columns) -> dict[str, tuple[str, Optional[str]]]:
    """Map lower-case quantity name -> (original header, unit or None)."""
    out = {}
    for col in columns:
        m = _HEADER.match(str(col))
        if not m:
            continue
        name = m.group(1).strip().lower()
        unit = m.group(2).strip() if m.group(2) else None
        out.setdefault(name, (col, unit))
    return out


def _read_metadata(text: str) -> dict[str, str]:
    meta = {}
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        key, sep, value = line[1:].partition(":")
        if sep:
            meta[key.strip().lower()] = value.strip()
    return meta


def label_phases_by_density(rho: np.ndarray, mode: Mode) -> list[Phase]:
    """Split a scan at its largest density jump.

    The denser side is labelled liquid and the other vapor when the jump is
    at least ``DENSITY_JUMP``-fold; otherwise every record is unknown.
    """
    n = len(rho)
    if n < 2:
        return [Phase.UNKNOWN] * n
    ratio = rho[1:] / rho[:-1]
    jump = np.maximum(ratio, 1.0 / ratio)
    k = int(np.argmax(jump))
    if jump[k] < DENSITY_JUMP:
        return [Phase.UNKNOWN] * n
    first_dense = rho[k] > rho[k + 1]
    lo, hi = (Phase.LIQUID, Phase.VAPOR) if first_dense else (Phase.VAPOR, Phase.LIQUID)
    return [lo] * (k + 1) + [hi] * (n - k - 1)


def parse_fluid_table(file, fluid: FluidSpec, mode, fixed_value: Optional[float] = None) -> IsoDataset:
    """Read a property CSV into an :class:`IsoDataset`.

    Densities are normalised to kg/m^3 (molar densities via the fluid's
    molar mass), viscosities to Pa s, pressures to MPa. Rows without a
    viscosity are dropped and counted in ``n_dropped``. ``fixed_value``
    defaults to the median of the fixed coordinate.
    """
    mode = Mode(mode)
    if isinstance(file, (str, Path)):
        path = Path(file)
        text = path.read_text()
        source = str(path)
    else:
        text = file.read()
        source = getattr(file, "name", None)
    try:
        df = pd.read_csv(io.StringIO(text), comment="#", skip_blank_lines=True)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise FluidTableError(f"cannot parse {source or 'table'}: {exc}") from None

    cols = _column_map(df.columns)
    values = {}
    for name, (dim, target) in _REQUIRED.items():
        if name not in cols:
            raise FluidTableError(f"missing required column {name.capitalize()!r}")
        header, unit = cols[name]
        if unit is None:
            raise FluidTableError(f"column {header!r} does not declare a unit")
        try:
            unit = canonical_unit(unit)
        except KeyError:
            raise FluidTableError(f"unknown unit {unit!r} in column {header!r}") from None
        udim = UNITS[unit][0]
        ok = udim in _DENSITY_DIMS if dim is None else udim is dim
        if not ok:
            raise FluidTableError(f"unit {unit!r} in column {header!r} is not a {name} unit")
        raw = pd.to_numeric(df[header], errors="coerce").to_numpy(dtype=float)
        values[name] = (raw, unit, target)

    visc_missing = np.isnan(values["viscosity"][0])
    n_dropped = int(visc_missing.sum())
    keep = ~visc_missing
    for name in ("temperature", "pressure", "density"):
        bad = np.isnan(values[name][0]) & keep
        if bad.any():
            row = int(np.argmax(bad))
            raise FluidTableError(f"missing or non-numeric {name} in data row {row + 1}")

    conv = {}
    for name, (raw, unit, target) in values.items():
        x = raw[keep]
        conv[name] = np.array(
            [convert(Quantity(v, unit), target, molar_mass=fluid.molar_mass).value for v in x]
        )

    if "phase" in cols:
        phases = [Phase.parse(p) for p in df[cols["phase"][0]].to_numpy()[keep]]
    else:
        phases = None

    T, P, rho, eta = conv["temperature"], conv["pressure"], conv["density"], conv["viscosity"]
    fixed_arr, vary = (P, T) if mode is Mode.ISOBARIC else (T, P)
    if phases is None:
        order = np.argsort(vary, kind="stable")
        phases_sorted = label_phases_by_density(rho[order], mode)
        phases = [None] * len(order)
        for slot, i in enumerate(order):
            phases[i] = phases_sorted[slot]
    # at a saturation point the phase seen first along the scan goes first
    first = {Mode.ISOBARIC: Phase.LIQUID, Mode.ISOTHERMAL: Phase.VAPOR}[mode]
    order = sorted(range(len(vary)), key=lambda i: (vary[i], phases[i] is not first))
    records = tuple(StateRecord(T[i], P[i], rho[i], eta[i], phases[i]) for i in order)
    if fixed_value is None:
        fixed_value = float(np.median(fixed_arr)) if len(fixed_arr) else float("nan")
    notes = (f"dropped {n_dropped} row(s) without viscosity",) if n_dropped else ()
    return IsoDataset(fluid, mode, fixed_value, records, n_dropped=n_dropped, source=source, notes=notes)


def read_table_metadata(path) -> dict[str, str]:
    """``# key: value`` lines at the top of a property CSV."""
    return _read_metadata(Path(path).read_text())


def _dataset_identity(path: Path, meta: dict[str, str]) -> tuple[str, str]:
    fluid = meta.get("fluid")
    mode = meta.get("mode")
    if fluid is None or mode is None:
        parts = path.stem.split("_")
        if len(parts) >= 2:
            fluid = fluid or parts[0]
            mode = mode or parts[1]
    if fluid is None or mode is None:
        raise FluidTableError(f"{path.name}: cannot tell fluid and mode (add '# fluid:' and '# mode:' lines)")
    return fluid, mode


def load_datasets(data_dir, registry) -> list[IsoDataset]:
    """Parse every ``*.csv`` in ``data_dir`` (sorted by name).

    Fluid and mode come from ``# fluid:`` / ``# mode:`` header lines, or
    from a ``<fluid>_<mode>_...csv`` file name.
    """
    data_dir = Path(data_dir)
    if not data_dir.is_dir():
        raise FluidTableError(f"{data_dir} is not a directory")
    out = []
    for path in sorted(data_dir.glob("*.csv")):
        meta = read_table_metadata(path)
        fluid, mode = _dataset_identity(path, meta)
        try:
            mode = Mode(mode.lower())
        except ValueError:
            raise FluidTableError(f"{path.name}: unknown mode {mode!r}") from None
        out.append(parse_fluid_table(path, registry[fluid], mode))
    return out
