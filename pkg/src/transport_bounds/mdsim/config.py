"""Simulation configuration (reduced units, m = 1)."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields
from typing import Optional, Union

FORMAT_VERSION = 1


class ConfigError(ValueError):
    """Invalid configuration. ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class LennardJones:
    cutoff: float = 2.5
    kind: str = field(default="lennard_jones", init=False)


@dataclass(frozen=True)
class Yukawa:
    """``V(r) = coupling * exp(-kappa r) / r``; charge and mass are 1.

    ``magnetic_field`` is the out-of-plane field, equal to the cyclotron
    frequency in these units. ``cutoff=None`` picks the distance where the
    pair force magnitude drops below ``force_tol``.
    """

    kappa: float = 2.0
    coupling: float = 1.0
    magnetic_field: float = 0.0
    cutoff: Optional[float] = None
    force_tol: float = 1e-6
    kind: str = field(default="yukawa", init=False)

    def resolved_cutoff(self) -> float:
        if self.cutoff is not None:
            return float(self.cutoff)
        # bisection on coupling * exp(-k r) (1 + k r) / r^2 = tol
        f = lambda r: self.coupling * math.exp(-self.kappa * r) * (1 + self.kappa * r) / r**2
        lo, hi = 1e-3, 1.0
        while f(hi) > self.force_tol:
            hi *= 2.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if f(mid) > self.force_tol:
                lo = mid
            else:
                hi = mid
        return hi


@dataclass(frozen=True)
class NoThermostat:
    kind: str = field(default="none", init=False)


@dataclass(frozen=True)
class VelocityRescale:
    interval: int = 10
    kind: str = field(default="velocity_rescale", init=False)


@dataclass(frozen=True)
class Langevin:
    friction: float = 1.0
    kind: str = field(default="langevin", init=False)


Interaction = Union[LennardJones, Yukawa]
Thermostat = Union[NoThermostat, VelocityRescale, Langevin]

_INTERACTIONS = {"lennard_jones": LennardJones, "yukawa": Yukawa}
_THERMOSTATS = {"none": NoThermostat, "velocity_rescale": VelocityRescale, "langevin": Langevin}


@dataclass(frozen=True)
class SimConfig:
    """Everything needed to reproduce a run bit for bit."""

    n_particles: int = 864
    dimension: int = 3
    number_density: float = 0.85
    temperature: float = 0.76
    dt: float = 0.005
    n_equil_steps: int = 10_000
    n_prod_steps: int = 100_000
    sample_stride: int = 2
    interaction: Interaction = field(default_factory=LennardJones)
    thermostat: Thermostat = field(default_factory=VelocityRescale)
    seed: int = 0
    record_positions: bool = False
    skin: float = 0.3

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not isinstance(self.n_particles, int) or self.n_particles < 2:
            raise ConfigError("n_particles", "must be an integer >= 2")
        if self.dimension not in (2, 3):
            raise ConfigError("dimension", "must be 2 or 3")
        for name in ("number_density", "temperature", "dt"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and v > 0 and math.isfinite(v)):
                raise ConfigError(name, "must be a positive number")
        for name in ("n_equil_steps", "n_prod_steps"):
            if not isinstance(getattr(self, name), int) or getattr(self, name) < 0:
                raise ConfigError(name, "must be a non-negative integer")
        if not isinstance(self.sample_stride, int) or self.sample_stride < 1:
            raise ConfigError("sample_stride", "must be a positive integer")
        if not isinstance(self.interaction, (LennardJones, Yukawa)):
            raise ConfigError("interaction", "unknown interaction")
        if isinstance(self.interaction, Yukawa):
            if self.dimension != 2:
                raise ConfigError("dimension", "Yukawa systems are two dimensional")
            if not self.interaction.kappa >= 0:
                raise ConfigError("interaction.kappa", "must be non-negative")
        if isinstance(self.interaction, LennardJones) and not self.interaction.cutoff > 0:
            raise ConfigError("interaction.cutoff", "must be positive")
        if isinstance(self.thermostat, VelocityRescale) and self.thermostat.interval < 1:
            raise ConfigError("thermostat.interval", "must be a positive integer")
        if isinstance(self.thermostat, Langevin) and not self.thermostat.friction > 0:
            raise ConfigError("thermostat.friction", "must be positive")
        if self.skin < 0:
            raise ConfigError("skin", "must be non-negative")

    @property
    def box_length(self) -> float:
        return (self.n_particles / self.number_density) ** (1.0 / self.dimension)

    @property
    def cutoff(self) -> float:
        if isinstance(self.interaction, Yukawa):
            return self.interaction.resolved_cutoff()
        return float(self.interaction.cutoff)

    @property
    def magnetic_field(self) -> float:
        return getattr(self.interaction, "magnetic_field", 0.0)

    @property
    def sample_interval(self) -> float:
        return self.sample_stride * self.dt

    def to_dict(self) -> dict:
        d = asdict(self)
        d["format_version"] = FORMAT_VERSION
        return d

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    @classmethod
    def from_dict(cls, raw: dict) -> "SimConfig":
        """Build from a plain mapping, reporting the first bad field path."""
        if not isinstance(raw, dict):
            raise ConfigError("<root>", "config must be a mapping")
        raw = dict(raw)
        version = raw.pop("format_version", FORMAT_VERSION)
        if version != FORMAT_VERSION:
            raise ConfigError("format_version", f"unsupported version {version!r}")
        known = {f.name for f in fields(cls)}
        for key in raw:
            if key not in known:
                raise ConfigError(key, "unknown field")
        kwargs = {}
        for key, value in raw.items():
            if key == "interaction":
                kwargs[key] = _tagged(value, _INTERACTIONS, "interaction")
            elif key == "thermostat":
                kwargs[key] = _tagged(value, _THERMOSTATS, "thermostat")
            else:
                kwargs[key] = value
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError("<root>", str(exc)) from None


def _tagged(value, registry, path):
    if isinstance(value, str):
        value = {"kind": value}
    if not isinstance(value, dict) or "kind" not in value:
        raise ConfigError(f"{path}.kind", "missing")
    value = dict(value)
    kind = value.pop("kind")
    if kind not in registry:
        raise ConfigError(f"{path}.kind", f"must be one of {sorted(registry)}")
    cls = registry[kind]
    allowed = {f.name for f in fields(cls) if f.init}
    for key in value:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}", "unknown field")
    return cls(**value)
