"""Numba kernels: neighbour lists, pair forces and the integrator loop.

Everything here is single threaded so that results are bit reproducible.
"""

import math

import numpy as np
from numba import njit

LJ = 0
YUKAWA = 1

OK = 0
BLOWUP = 1


@njit(cache=True)
def pair_energy(kind, r, p0, p1):
    if kind == LJ:
        ir6 = 1.0 / r**6
        return 4.0 * (ir6 * ir6 - ir6)
    return p0 * math.exp(-p1 * r) / r


@njit(cache=True)
def pair_force_over_r(kind, r2, p0, p1):
    """-(du/dr) / r for the pair at squared distance ``r2``."""
    if kind == LJ:
        ir2 = 1.0 / r2
        ir6 = ir2 * ir2 * ir2
        return 24.0 * ir2 * ir6 * (2.0 * ir6 - 1.0)
    r = math.sqrt(r2)
    return p0 * math.exp(-p1 * r) * (1.0 + p1 * r) / (r2 * r)


@njit(cache=True, inline="always")
def _mic(x, box, half_box):
    if x > half_box:
        return x - box
    if x < -half_box:
        return x + box
    return x


@njit(cache=True)
def _dist2(pos, i, j, box, half_box):
    r2 = 0.0
    for a in range(pos.shape[1]):
        x = _mic(pos[i, a] - pos[j, a], box, half_box)
        r2 += x * x
    return r2


@njit(cache=True)
def build_neighbors(pos, box, rlist2):
    """Half neighbour list in CSR form: ``nbrs[start[i]:start[i+1]]``.

    Uses a cell list when at least three cells fit per box side, otherwise
    an all-pairs scan. Each row is sorted so the list does not depend on the
    search order.
    """
    n, d = pos.shape
    half_box = 0.5 * box
    rlist = math.sqrt(rlist2)
    m = int(box / rlist)
    counts = np.zeros(n + 1, dtype=np.int64)
    cap = 64 * n
    nbrs = np.empty(cap, dtype=np.int64)
    k = 0
    if m < 3:
        for i in range(n):
            counts[i] = k
            for j in range(i + 1, n):
                if _dist2(pos, i, j, box, half_box) < rlist2:
                    if k == cap:
                        cap *= 2
                        grown = np.empty(cap, dtype=np.int64)
                        grown[:k] = nbrs[:k]
                        nbrs = grown
                    nbrs[k] = j
                    k += 1
        counts[n] = k
        return counts, nbrs[:k].copy()

    ncell = m**d
    head = -np.ones(ncell, dtype=np.int64)
    link = -np.ones(n, dtype=np.int64)
    cell_of = np.empty((n, d), dtype=np.int64)
    for i in range(n):
        c = 0
        for a in range(d):
            ca = int(pos[i, a] / box * m)
            if ca >= m:
                ca = m - 1
            cell_of[i, a] = ca
            c = c * m + ca
        link[i] = head[c]
        head[c] = i
    n_off = 3**d
    buf = np.empty(n, dtype=np.int64)
    for i in range(n):
        counts[i] = k
        nb = 0
        for o in range(n_off):
            rem = o
            c = 0
            for a in range(d):
                off = rem % 3 - 1
                rem //= 3
                ca = (cell_of[i, a] + off) % m
                c = c * m + ca
            j = head[c]
            while j >= 0:
                if j > i and _dist2(pos, i, j, box, half_box) < rlist2:
                    buf[nb] = j
                    nb += 1
                j = link[j]
        row = np.sort(buf[:nb])
        while k + nb > cap:
            cap *= 2
            grown = np.empty(cap, dtype=np.int64)
            grown[:k] = nbrs[:k]
            nbrs = grown
        nbrs[k:k + nb] = row
        k += nb
    counts[n] = k
    return counts, nbrs[:k].copy()


@njit(cache=True)
def compute_forces(pos, box, start, nbrs, kind, p0, p1, rc2, ushift, forces, vloc):
    """Fill ``forces`` and per-particle ``vloc``; return total potential energy.

    ``vloc[i]`` sums every truncated-and-shifted pair term involving ``i``,
    so ``vloc.sum() == 2 * U``.
    """
    n, d = pos.shape
    half_box = 0.5 * box
    forces[:, :] = 0.0
    vloc[:] = 0.0
    u_tot = 0.0
    for i in range(n):
        xi = pos[i, 0]
        yi = pos[i, 1]
        zi = pos[i, 2] if d == 3 else 0.0
        fx = 0.0
        fy = 0.0
        fz = 0.0
        vi = 0.0
        for kk in range(start[i], start[i + 1]):
            j = nbrs[kk]
            dx = _mic(xi - pos[j, 0], box, half_box)
            dy = _mic(yi - pos[j, 1], box, half_box)
            dz = _mic(zi - pos[j, 2], box, half_box) if d == 3 else 0.0
            r2 = dx * dx + dy * dy + dz * dz
            if r2 < rc2:
                if kind == LJ:
                    ir2 = 1.0 / r2
                    ir6 = ir2 * ir2 * ir2
                    u = 4.0 * ir6 * (ir6 - 1.0) - ushift
                    fr = 24.0 * ir2 * ir6 * (2.0 * ir6 - 1.0)
                else:
                    r = math.sqrt(r2)
                    e = p0 * math.exp(-p1 * r) / r
                    u = e - ushift
                    fr = e * (1.0 + p1 * r) / r2
                vi += u
                vloc[j] += u
                u_tot += u
                fx += fr * dx
                fy += fr * dy
                forces[j, 0] -= fr * dx
                forces[j, 1] -= fr * dy
                if d == 3:
                    fz += fr * dz
                    forces[j, 2] -= fr * dz
        vloc[i] += vi
        forces[i, 0] += fx
        forces[i, 1] += fy
        if d == 3:
            forces[i, 2] += fz
    return u_tot


@njit(cache=True)
def advance(pos, upos, vel, forces, vloc, ref_pos, start, nbrs, box, dt, nsteps,
            kind, p0, p1, rc2, ushift, rlist2, skin, omega, friction, temperature, noise):
    """Advance ``nsteps`` velocity-Verlet steps in place.

    ``omega`` is the cyclotron frequency (2D only): the magnetic part of each
    step is a Boris rotation (implicit midpoint on the free gyration), which
    reduces exactly to a drift when ``omega == 0``. ``friction > 0`` applies
    an Ornstein-Uhlenbeck velocity update after each step using
    ``noise[step]``.

    Returns ``(status, u, start, nbrs, n_rebuilds)``.
    """
    n, d = pos.shape
    half = 0.5 * dt
    u = 0.0
    rebuilds = 0
    theta = omega * dt
    # (1 - i th/2) / (1 + i th/2) = c - i s
    den = 1.0 + 0.25 * theta * theta
    c = (1.0 - 0.25 * theta * theta) / den
    s = theta / den
    if friction > 0.0:
        ou_a = math.exp(-friction * dt)
        ou_b = math.sqrt((1.0 - ou_a * ou_a) * temperature)
    else:
        ou_a = 1.0
        ou_b = 0.0
    limit = 0.5 * box
    for step in range(nsteps):
        for i in range(n):
            for a in range(d):
                vel[i, a] += half * forces[i, a]
        for i in range(n):
            if omega != 0.0:
                wx = vel[i, 0]
                wy = vel[i, 1]
                vx = c * wx + s * wy
                vy = c * wy - s * wx
                disp0 = half * (wx + vx)
                disp1 = half * (wy + vy)
                vel[i, 0] = vx
                vel[i, 1] = vy
                if not (abs(disp0) < limit and abs(disp1) < limit):
                    return BLOWUP, u, start, nbrs, rebuilds
                pos[i, 0] += disp0
                pos[i, 1] += disp1
                upos[i, 0] += disp0
                upos[i, 1] += disp1
            else:
                for a in range(d):
                    disp = dt * vel[i, a]
                    if not abs(disp) < limit:
                        return BLOWUP, u, start, nbrs, rebuilds
                    pos[i, a] += disp
                    upos[i, a] += disp
            for a in range(d):
                if pos[i, a] >= box:
                    pos[i, a] -= box
                elif pos[i, a] < 0.0:
                    pos[i, a] += box
        # neighbour list validity
        maxd2 = 0.0
        for i in range(n):
            r2 = 0.0
            for a in range(d):
                x = _mic(pos[i, a] - ref_pos[i, a], box, 0.5 * box)
                r2 += x * x
            if r2 > maxd2:
                maxd2 = r2
        if 4.0 * maxd2 > skin * skin:
            start, nbrs = build_neighbors(pos, box, rlist2)
            ref_pos[:, :] = pos
            rebuilds += 1
        u = compute_forces(pos, box, start, nbrs, kind, p0, p1, rc2, ushift, forces, vloc)
        for i in range(n):
            for a in range(d):
                vel[i, a] += half * forces[i, a]
        if friction > 0.0:
            for i in range(n):
                for a in range(d):
                    vel[i, a] = ou_a * vel[i, a] + ou_b * noise[step, i, a]
    return OK, u, start, nbrs, rebuilds
