"""
Trajectory container and its interchange formats.

CSV layout (one row per sample and particle)::

    # format_version: 1
    # kind: trajectory
    # dimension: 3
    # n_particles: 500
    # box_length: 8.3799
    # config: {"n_particles": 500, ...}          (JSON, "null" if external)
    sample,time,particle,vx,vy,vz[,x,y,z][,V,K]

Binary layout: a NumPy ``.npz`` archive with the same arrays plus a
``header`` entry holding the header fields as JSON.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from .config import FORMAT_VERSION, SimConfig

_AXES = "xyz"


class TrajectoryFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Trajectory:
    """Sampled production run.

    Arrays are ``(n_samples, n_particles, d)`` for velocities and positions,
    ``(n_samples, n_particles)`` for local potentials ``V_i`` and kinetic
    energies ``K_i``. Positions are unwrapped.
    """

    times: np.ndarray
    velocities: np.ndarray
    positions: Optional[np.ndarray] = None
    local_potentials: Optional[np.ndarray] = None
    kinetic_per_particle: Optional[np.ndarray] = None
    potential_energy: Optional[np.ndarray] = None
    config: Optional[SimConfig] = None
    box_length: Optional[float] = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.velocities, dtype=float)
        if v.ndim != 3:
            raise TrajectoryFormatError("velocities must have shape (n_samples, n_particles, d)")
        if t.shape != (v.shape[0],):
            raise TrajectoryFormatError("times must have one entry per sample")
        if t.size > 1:
            steps = np.diff(t)
            if not np.all(steps > 0):
                raise TrajectoryFormatError("times must be strictly increasing")
            if not np.allclose(steps, steps[0], rtol=1e-6, atol=0):
                raise TrajectoryFormatError("times must be uniformly spaced")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "velocities", v)
        for name in ("positions", "local_potentials", "kinetic_per_particle"):
            arr = getattr(self, name)
            if arr is None:
                continue
            arr = np.asarray(arr, dtype=float)
            want = v.shape if name == "positions" else v.shape[:2]
            if arr.shape != want:
                raise TrajectoryFormatError(f"{name} has shape {arr.shape}, expected {want}")
            object.__setattr__(self, name, arr)

    @property
    def n_samples(self) -> int:
        return self.velocities.shape[0]

    @property
    def n_particles(self) -> int:
        return self.velocities.shape[1]

    @property
    def dimension(self) -> int:
        return self.velocities.shape[2]

    @property
    def sample_interval(self) -> float:
        return float(self.times[1] - self.times[0]) if self.n_samples > 1 else float("nan")

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    def header(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "kind": "trajectory",
            "dimension": self.dimension,
            "n_particles": self.n_particles,
            "box_length": self.box_length,
            "config": None if self.config is None else self.config.to_dict(),
        }


def _columns(traj: Trajectory) -> list[str]:
    d = traj.dimension
    cols = ["sample", "time", "particle"] + [f"v{_AXES[a]}" for a in range(d)]
    if traj.positions is not None:
        cols += [_AXES[a] for a in range(d)]
    if traj.local_potentials is not None and traj.kinetic_per_particle is not None:
        cols += ["V", "K"]
    return cols


def write_trajectory(traj: Trajectory, path) -> Path:
    """Write ``traj`` as CSV (``.csv``) or NumPy archive (``.npz``)."""
    path = Path(path)
    header = traj.header()
    if path.suffix == ".npz":
        arrays = {"times": traj.times, "velocities": traj.velocities}
        for name in ("positions", "local_potentials", "kinetic_per_particle", "potential_energy"):
            if getattr(traj, name) is not None:
                arrays[name] = getattr(traj, name)
        np.savez_compressed(path, header=np.array(json.dumps(header, sort_keys=True)), **arrays)
        return path

    ns, n, d = traj.velocities.shape
    blocks = [
        np.repeat(np.arange(ns), n)[:, None].astype(float),
        np.repeat(traj.times, n)[:, None],
        np.tile(np.arange(n), ns)[:, None].astype(float),
        traj.velocities.reshape(-1, d),
    ]
    if traj.positions is not None:
        blocks.append(traj.positions.reshape(-1, d))
    if traj.local_potentials is not None and traj.kinetic_per_particle is not None:
        blocks.append(traj.local_potentials.reshape(-1, 1))
        blocks.append(traj.kinetic_per_particle.reshape(-1, 1))
    table = np.hstack(blocks)
    with open(path, "w", newline="") as fh:
        for key in ("format_version", "kind", "dimension", "n_particles", "box_length"):
            fh.write(f"# {key}: {header[key]}\n")
        fh.write(f"# config: {json.dumps(header['config'], sort_keys=True)}\n")
        fh.write(",".join(_columns(traj)) + "\n")
        fmt = ["%d", "%.17g", "%d"] + ["%.17g"] * (table.shape[1] - 3)
        np.savetxt(fh, table, fmt=fmt, delimiter=",")
    return path


def read_header(fh) -> tuple[dict, int]:
    """Parse ``# key: value`` lines; return (fields, number of lines read)."""
    meta = {}
    count = 0
    for line in fh:
        if not line.startswith("#"):
            break
        count += 1
        key, sep, value = line[1:].partition(":")
        if not sep:
            continue
        key, value = key.strip(), value.strip()
        try:
            meta[key] = json.loads(value)
        except json.JSONDecodeError:
            meta[key] = value
    return meta, count


def _config_from_header(raw):
    if raw in (None, "null"):
        return None
    try:
        return SimConfig.from_dict(raw)
    except ValueError:
        return None


def read_trajectory(path) -> Trajectory:
    """Read a trajectory written by :func:`write_trajectory` or an external tool.

    External CSV files need only ``time``, ``particle`` and velocity columns
    (``vx``, ``vy`` and optionally ``vz``).
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    if path.suffix == ".npz":
        try:
            with np.load(path) as z:
                header = json.loads(str(z["header"]))
                arrays = {k: z[k] for k in z.files if k != "header"}
        except (OSError, ValueError, KeyError) as exc:
            raise TrajectoryFormatError(f"corrupt trajectory archive: {exc}") from None
        _check_header(header)
        return Trajectory(
            config=_config_from_header(header.get("config")),
            box_length=header.get("box_length"),
            **arrays,
        )

    text = path.read_text()
    meta, nhead = read_header(io.StringIO(text))
    _check_header(meta)
    try:
        df = pd.read_csv(io.StringIO(text), skiprows=nhead, float_precision="round_trip")
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise TrajectoryFormatError(f"corrupt trajectory file: {exc}") from None
    vcols = [c for c in ("vx", "vy", "vz") if c in df.columns]
    if "time" not in df.columns or "particle" not in df.columns or len(vcols) < 1:
        raise TrajectoryFormatError("trajectory CSV needs time, particle and velocity columns")
    if df.isna().any().any():
        raise TrajectoryFormatError("trajectory CSV has missing values")
    df = df.sort_values(["time", "particle"], kind="stable")
    times = np.unique(df["time"].to_numpy())
    n = df["particle"].nunique()
    if len(df) != times.size * n:
        raise TrajectoryFormatError("every sample must list every particle")
    d = len(vcols)
    shape3 = (times.size, n, d)
    pcols = [c for c in ("x", "y", "z")[:d] if c in df.columns]
    positions = df[pcols].to_numpy().reshape(shape3) if len(pcols) == d else None
    V = df["V"].to_numpy().reshape(shape3[:2]) if "V" in df.columns else None
    K = df["K"].to_numpy().reshape(shape3[:2]) if "K" in df.columns else None
    return Trajectory(
        times=times,
        velocities=df[vcols].to_numpy().reshape(shape3),
        positions=positions,
        local_potentials=V,
        kinetic_per_particle=K,
        config=_config_from_header(meta.get("config")),
        box_length=meta.get("box_length"),
    )


def _check_header(meta: dict) -> None:
    version = meta.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise TrajectoryFormatError(f"unsupported format_version {version!r}")
    kind = meta.get("kind", "trajectory")
    if kind != "trajectory":
        raise TrajectoryFormatError(f"expected a trajectory file, got kind={kind!r}")
