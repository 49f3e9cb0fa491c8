"""Lattice initialisation, single steps and equilibration + production runs."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import kernels
from .config import ConfigError, Langevin, LennardJones, SimConfig, VelocityRescale, Yukawa
from .trajectory import Trajectory

logger = logging.getLogger(__name__)

_CHUNK = 256


class SimulationBlowUp(RuntimeError):
    """A particle moved more than half a box length in one step."""


@dataclass
class State:
    """Mutable integrator state owned by a single engine."""

    pos: np.ndarray
    upos: np.ndarray
    vel: np.ndarray
    forces: np.ndarray
    vloc: np.ndarray
    ref_pos: np.ndarray
    start: np.ndarray
    nbrs: np.ndarray
    box: float
    potential: float
    n_steps: int = 0
    n_rebuilds: int = 0

    @property
    def kinetic(self) -> float:
        return 0.5 * float(np.sum(self.vel * self.vel))

    @property
    def total_energy(self) -> float:
        return self.kinetic + self.potential

    @property
    def momentum(self) -> np.ndarray:
        return self.vel.sum(axis=0)


def _lattice_sites(n: int, d: int):
    """Return (fractional sites, spacing count) or raise with nearest count."""
    if d == 3:
        k = round((n / 4) ** (1 / 3))
        if 4 * k**3 == n:
            cell = np.array([[0, 0, 0], [0.5, 0.5, 0], [0.5, 0, 0.5], [0, 0.5, 0.5]])
            grid = np.stack(np.meshgrid(*[np.arange(k)] * 3, indexing="ij"), -1).reshape(-1, 3)
            sites = (grid[:, None, :] + cell[None, :, :]).reshape(-1, 3) / k
            return sites, 1.0 / k
        k = round(n ** (1 / 3))
        if k**3 == n:
            grid = np.stack(np.meshgrid(*[np.arange(k)] * 3, indexing="ij"), -1).reshape(-1, 3)
            return grid / k, 1.0 / k
        valid = sorted({4 * j**3 for j in range(1, 40)} | {j**3 for j in range(2, 100)})
    else:
        k = round(n**0.5)
        if k * k == n:
            grid = np.stack(np.meshgrid(*[np.arange(k)] * 2, indexing="ij"), -1).reshape(-1, 2)
            return grid / k, 1.0 / k
        valid = [j * j for j in range(2, 1000)]
    nearest = min(valid, key=lambda v: (abs(v - n), v))
    raise ConfigError(
        "n_particles",
        f"{n} does not fill a {'fcc/simple cubic' if d == 3 else 'square'} lattice; "
        f"nearest valid count is {nearest}",
    )


def _potential_params(config: SimConfig):
    inter = config.interaction
    rc = config.cutoff
    if isinstance(inter, LennardJones):
        kind, p0, p1 = kernels.LJ, 0.0, 0.0
    else:
        kind, p0, p1 = kernels.YUKAWA, float(inter.coupling), float(inter.kappa)
    ushift = kernels.pair_energy(kind, rc, p0, p1)
    return kind, p0, p1, rc, ushift


def init_state(config: SimConfig) -> State:
    """Lattice positions with <=1% jitter and zero-momentum MB velocities."""
    n, d = config.n_particles, config.dimension
    box = config.box_length
    rc = config.cutoff
    if rc + config.skin >= 0.5 * box:
        raise ConfigError(
            "interaction.cutoff", f"cutoff + skin = {rc + config.skin:.4g} must be below half the box {box / 2:.4g}"
        )
    sites, frac_spacing = _lattice_sites(n, d)
    rng = np.random.default_rng(config.seed)
    spacing = frac_spacing * box
    pos = sites * box + rng.uniform(-0.01, 0.01, size=(n, d)) * spacing
    pos = np.mod(pos, box)
    vel = rng.standard_normal((n, d)) * np.sqrt(config.temperature)
    vel -= vel.mean(axis=0)
    vel *= np.sqrt(config.temperature * n * d / np.sum(vel * vel))

    kind, p0, p1, rc, ushift = _potential_params(config)
    rlist = rc + config.skin
    start, nbrs = kernels.build_neighbors(pos, box, rlist * rlist)
    forces = np.zeros_like(pos)
    vloc = np.zeros(n)
    u = kernels.compute_forces(pos, box, start, nbrs, kind, p0, p1, rc * rc, ushift, forces, vloc)
    return State(
        pos=pos,
        upos=pos.copy(),
        vel=vel,
        forces=forces,
        vloc=vloc,
        ref_pos=pos.copy(),
        start=start,
        nbrs=nbrs,
        box=box,
        potential=float(u),
    )


_EMPTY_NOISE = np.zeros((1, 1, 1))


def _advance(state: State, config: SimConfig, nsteps: int, friction: float = 0.0, noise=None) -> State:
    kind, p0, p1, rc, ushift = _potential_params(config)
    rlist = rc + config.skin
    status, u, start, nbrs, rebuilds = kernels.advance(
        state.pos, state.upos, state.vel, state.forces, state.vloc, state.ref_pos,
        state.start, state.nbrs, state.box, config.dt, nsteps,
        kind, p0, p1, rc * rc, ushift, rlist * rlist, config.skin,
        float(config.magnetic_field), friction, float(config.temperature),
        _EMPTY_NOISE if noise is None else noise,
    )
    state.start, state.nbrs = start, nbrs
    state.n_rebuilds += rebuilds
    if status == kernels.BLOWUP:
        raise SimulationBlowUp(
            f"particle moved more than half the box in one step near step {state.n_steps}; reduce dt"
        )
    state.potential = float(u)
    state.n_steps += nsteps
    return state


def step(state: State, config: SimConfig, nsteps: int = 1) -> State:
    """``nsteps`` NVE steps: velocity Verlet, with a Boris rotation when a field is set."""
    return _advance(state, config, int(nsteps))


def _rescale_to(state: State, kinetic_target: float) -> None:
    k = state.kinetic
    if k > 0 and kinetic_target > 0:
        state.vel *= np.sqrt(kinetic_target / k)


def equilibrate(state: State, config: SimConfig, rng: np.random.Generator) -> State:
    """Thermostatted equilibration followed by an energy-targeted rescale.

    The final rescale sets the total energy to ``K_target + <U>``, with
    ``<U>`` averaged over the second half of equilibration, so that the
    subsequent NVE production fluctuates around the requested temperature.
    """
    n, d = config.n_particles, config.dimension
    k_target = 0.5 * d * n * config.temperature
    nsteps = config.n_equil_steps
    thermo = config.thermostat
    u_samples = []
    done = 0
    while done < nsteps:
        if isinstance(thermo, VelocityRescale):
            chunk = min(thermo.interval, nsteps - done)
            _advance(state, config, chunk)
            _rescale_to(state, k_target)
        elif isinstance(thermo, Langevin):
            chunk = min(_CHUNK, nsteps - done)
            noise = rng.standard_normal((chunk, n, d))
            _advance(state, config, chunk, friction=thermo.friction, noise=noise)
        else:
            chunk = min(_CHUNK, nsteps - done)
            _advance(state, config, chunk)
        done += chunk
        if done > nsteps // 2:
            u_samples.append(state.potential)
    if u_samples:
        e_target = k_target + float(np.mean(u_samples))
        _rescale_to(state, e_target - state.potential)
    state.vel -= state.vel.mean(axis=0)
    return state


def run(config: SimConfig) -> Trajectory:
    """Equilibrate, then sample an NVE production run.

    Samples are taken every ``sample_stride`` steps, starting with the
    configuration at the start of production (time 0).
    """
    state = init_state(config)
    rng = np.random.default_rng([config.seed, 1])
    equilibrate(state, config, rng)
    logger.info("equilibrated %d steps, T_kin=%.4f", config.n_equil_steps,
                2 * state.kinetic / (config.dimension * config.n_particles))

    n, d = config.n_particles, config.dimension
    n_samples = config.n_prod_steps // config.sample_stride + 1
    vel = np.empty((n_samples, n, d))
    vloc = np.empty((n_samples, n))
    kin = np.empty((n_samples, n))
    upot = np.empty(n_samples)
    pos = np.empty((n_samples, n, d)) if config.record_positions else None
    state.upos[:] = state.pos

    def record(k):
        vel[k] = state.vel
        vloc[k] = state.vloc
        kin[k] = 0.5 * np.sum(state.vel * state.vel, axis=1)
        upot[k] = state.potential
        if pos is not None:
            pos[k] = state.upos

    record(0)
    for k in range(1, n_samples):
        _advance(state, config, config.sample_stride)
        record(k)

    times = np.arange(n_samples) * config.sample_interval
    return Trajectory(
        times=times,
        velocities=vel,
        positions=pos,
        local_potentials=vloc,
        kinetic_per_particle=kin,
        potential_energy=upot,
        config=config,
        box_length=state.box,
    )
