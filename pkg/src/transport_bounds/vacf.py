"""
Velocity autocorrelation analysis.

``G_v(t)`` is the single Cartesian component autocorrelation
``<v_il(t) v_il(0)>``; averaging over particles, components and time
origins only reduces noise. With that convention

    D  = int_0^inf G_v dt,      D+ = int_0^{t_v} G_v dt,

where ``t_v`` is the first zero of ``G_v`` (``inf`` if it never changes
sign). The triangle bound ``G_v(0)^2 / (2 max|dG_v/dt|)`` is a lower bound
on ``D+``.

Statistical errors come from contiguous time blocks: every estimator is
re-evaluated on each block and the spread of block values gives a standard
error.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
from scipy.signal import savgol_filter
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ._validation import check_trajectory_like
from .mdsim.trajectory import Trajectory, read_header

__all__ = [
    "Vacf",
    "Integral",
    "TransportEstimate",
    "MaxLagError",
    "autocorrelation",
    "estimate_vacf",
    "vacf_from_function",
    "first_zero",
    "running_integral",
    "plateau_cutoff",
    "green_kubo_D",
    "d_plus",
    "max_slope",
    "triangle_bound",
    "msd_curve",
    "msd_diffusion",
    "analyze",
    "VACFEstimator",
    "write_vacf",
    "read_vacf",
]

FORMAT_VERSION = 1
PLATEAU_TOL = 0.005


class MaxLagError(ValueError):
    """Requested lag window exceeds half the production window."""

    def __init__(self, requested: float, admissible: float):
        super().__init__(
            f"max_lag={requested:.6g} exceeds half the production window; "
            f"admissible maximum is {admissible:.6g}"
        )
        self.requested = requested
        self.admissible = admissible


@dataclass(frozen=True)
class Vacf:
    """Sampled ``G_v(t)`` on a uniform lag grid starting at 0."""

    lags: np.ndarray
    values: np.ndarray
    n_origins: int = 1
    per_component: bool = True
    stderr: Optional[np.ndarray] = None
    blocks: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        lags = np.asarray(self.lags, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if lags.ndim != 1 or lags.shape != vals.shape or lags.size < 2:
            raise ValueError("lags and values must be 1D arrays of equal length >= 2")
        if lags[0] != 0.0:
            raise ValueError("lags must start at 0")
        if not np.all(np.diff(lags) > 0):
            raise ValueError("lags must be strictly increasing")
        if not vals[0] > 0:
            raise ValueError("G_v(0) must be positive")
        object.__setattr__(self, "lags", lags)
        object.__setattr__(self, "values", vals)

    @property
    def g0(self) -> float:
        return float(self.values[0])

    @property
    def dt(self) -> float:
        return float(self.lags[1] - self.lags[0])

    @property
    def max_lag(self) -> float:
        return float(self.lags[-1])

    def block_vacfs(self) -> list["Vacf"]:
        if self.blocks is None:
            return []
        return [Vacf(self.lags, b, per_component=self.per_component) for b in self.blocks]

    def scaled(self, c: float) -> "Vacf":
        return Vacf(self.lags, c * self.values, self.n_origins, self.per_component)


@dataclass(frozen=True)
class Integral:
    """A running-integral estimate with its cutoff and diagnostics."""

    value: float
    stderr: float
    cutoff: float
    converged: bool = True
    curve: Optional[np.ndarray] = field(default=None, repr=False)


@dataclass(frozen=True)
class TransportEstimate:
    D: float
    D_err: float
    D_plus: float
    D_plus_err: float
    t_v: float
    slope_max: float
    triangle_bound: float
    triangle_bound_err: float
    gk_cutoff: float
    gk_converged: bool
    msd_D: Optional[float] = None
    msd_D_err: Optional[float] = None

    @property
    def relative_difference(self) -> float:
        """(D+ - D) / D."""
        return (self.D_plus - self.D) / self.D

    def as_dict(self) -> dict:
        """JSON-ready mapping; an infinite ``t_v`` becomes ``None``."""
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["relative_difference"] = self.relative_difference
        out["t_v_infinite"] = math.isinf(self.t_v)
        if out["t_v_infinite"]:
            out["t_v"] = None
        return out


def _autocorr_fft(x: np.ndarray, nlag: int, chunk: int = 64) -> np.ndarray:
    """Sum over columns of the unnormalised lag products, lags 0..nlag."""
    ns, m = x.shape
    nfft = 1 << int(math.ceil(math.log2(2 * ns)))
    total = np.zeros(nlag + 1)
    for c0 in range(0, m, chunk):
        f = np.fft.rfft(x[:, c0:c0 + chunk], n=nfft, axis=0)
        acf = np.fft.irfft(f.real**2 + f.imag**2, n=nfft, axis=0)[: nlag + 1]
        total += acf.sum(axis=1)
    return total


def _autocorr_direct(x: np.ndarray, nlag: int) -> np.ndarray:
    ns = x.shape[0]
    return np.array([np.einsum("ij,ij->", x[: ns - k], x[k:]) for k in range(nlag + 1)])


def autocorrelation(x, nlag: int, method: str = "fft") -> np.ndarray:
    """Origin-averaged autocorrelation of each column of ``x``, averaged over columns.

    ``x`` has shape ``(n_samples, n_series)``; no mean is subtracted.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    ns, m = x.shape
    if nlag >= ns:
        raise ValueError("nlag must be smaller than the number of samples")
    if method == "fft":
        s = _autocorr_fft(x, nlag)
    elif method == "direct":
        s = _autocorr_direct(x, nlag)
    else:
        raise ValueError(f"unknown method {method!r}")
    counts = (ns - np.arange(nlag + 1)) * m
    return s / counts


def _block_slices(ns: int, nlag: int, n_blocks: int) -> list[slice]:
    nb = n_blocks
    while nb >= 2 and ns // nb < 2 * nlag + 1:
        nb -= 1
    if nb < 2:
        return []
    size = ns // nb
    return [slice(b * size, (b + 1) * size) for b in range(nb)]


def estimate_vacf(traj, max_lag: float, method: str = "fft", n_blocks: int = 8) -> Vacf:
    """Estimate ``G_v(t)`` on lags ``0..max_lag``.

    Parameters
    ----------
    traj : Trajectory or array_like
        A :class:`Trajectory`, or velocities shaped ``(n_samples, n_particles, d)``
        together with unit sample spacing.
    max_lag : float
        Longest lag, at most half of the sampled window.
    method : {"fft", "direct"}
    n_blocks : int
        Number of time blocks used for standard errors (reduced automatically
        when blocks would be shorter than ``2 * max_lag``).
    """
    vel, dt = check_trajectory_like(traj)
    ns = vel.shape[0]
    half_window = (ns - 1) // 2
    nlag = int(round(max_lag / dt))
    if nlag > half_window or max_lag > half_window * dt * (1 + 1e-12):
        raise MaxLagError(max_lag, half_window * dt)
    if nlag < 1:
        raise ValueError("max_lag must cover at least one sample interval")
    x = vel.reshape(ns, -1)
    values = autocorrelation(x, nlag, method)
    slices = _block_slices(ns, nlag, n_blocks)
    blocks = stderr = None
    if slices:
        blocks = np.array([autocorrelation(x[s], nlag, method) for s in slices])
        stderr = blocks.std(axis=0, ddof=1) / math.sqrt(len(slices))
    return Vacf(
        lags=np.arange(nlag + 1) * dt,
        values=values,
        n_origins=ns - nlag,
        stderr=stderr,
        blocks=blocks,
    )


def vacf_from_function(func, dt: float, max_lag: float) -> Vacf:
    """Sample an analytic ``G(t)`` on a uniform grid (synthetic checks)."""
    n = int(round(max_lag / dt))
    lags = np.arange(n + 1) * dt
    return Vacf(lags=lags, values=np.asarray(func(lags), dtype=float))


def first_zero(vacf: Vacf) -> float:
    """First time ``G_v`` reaches zero, by linear interpolation; ``inf`` if none."""
    g = vacf.values
    t = vacf.lags
    idx = np.flatnonzero(g <= 0.0)
    if idx.size == 0:
        return math.inf
    k = int(idx[0])
    if g[k] == 0.0:
        return float(t[k])
    return float(t[k - 1] + (t[k] - t[k - 1]) * g[k - 1] / (g[k - 1] - g[k]))


def running_integral(vacf: Vacf) -> np.ndarray:
    """Cumulative trapezoidal integral of ``G_v`` on the lag grid."""
    g = vacf.values
    out = np.empty_like(g)
    out[0] = 0.0
    np.cumsum(0.5 * (g[1:] + g[:-1]) * np.diff(vacf.lags), out=out[1:])
    return out


def _integral_to(vacf: Vacf, cutoff: float) -> float:
    t, g = vacf.lags, vacf.values
    if cutoff <= 0:
        return 0.0
    if cutoff >= t[-1]:
        return float(running_integral(vacf)[-1])
    k = int(np.searchsorted(t, cutoff, side="right")) - 1
    cum = running_integral(vacf)[k]
    frac = (cutoff - t[k]) / (t[k + 1] - t[k])
    g_end = g[k] + frac * (g[k + 1] - g[k])
    return float(cum + 0.5 * (g[k] + g_end) * (cutoff - t[k]))


def _range_extrema(x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Max and min of ``x[lo[k]:hi[k] + 1]`` for every k (sparse table)."""
    mx, mn = [x], [x]
    w = 1
    while 2 * w <= x.size:
        mx.append(np.maximum(mx[-1][:-w], mx[-1][w:]))
        mn.append(np.minimum(mn[-1][:-w], mn[-1][w:]))
        w *= 2
    length = hi - lo + 1
    level = np.floor(np.log2(length)).astype(int)
    out_max = np.empty(lo.size)
    out_min = np.empty(lo.size)
    for k in np.unique(level):
        sel = level == k
        a, b = lo[sel], hi[sel] - (1 << k) + 1
        out_max[sel] = np.maximum(mx[k][a], mx[k][b])
        out_min[sel] = np.minimum(mn[k][a], mn[k][b])
    return out_max, out_min


def plateau_cutoff(vacf: Vacf, tol: float = PLATEAU_TOL, min_index: int = 10) -> tuple[float, bool]:
    """Smallest lag whose running integral varied by < ``tol`` over the preceding decade.

    The decade is ``[t/10, t]``. Returns ``(cutoff, converged)``; when no
    lag qualifies the full window is returned with ``converged=False``.
    """
    I = running_integral(vacf)
    n = I.size
    if n <= min_index:
        return float(vacf.lags[-1]), False
    j = np.arange(min_index, n)
    hi_, lo_ = _range_extrema(I, j // 10, j)
    ok = ((hi_ - lo_) < tol * np.abs(I[j])) & (I[j] != 0.0)
    if not ok.any():
        return float(vacf.lags[-1]), False
    return float(vacf.lags[j[int(np.argmax(ok))]]), True


def _block_err(vacf: Vacf, fn) -> float:
    blocks = vacf.block_vacfs()
    if len(blocks) < 2:
        return float("nan")
    vals = np.array([fn(b) for b in blocks], dtype=float)
    vals = vals[np.isfinite(vals)]
    if vals.size < 2:
        return float("nan")
    return float(vals.std(ddof=1) / math.sqrt(vals.size))


def green_kubo_D(vacf: Vacf, cutoff: Optional[float] = None) -> Integral:
    """Trapezoidal ``int_0^cutoff G_v dt``.

    Without an explicit ``cutoff`` the plateau rule of :func:`plateau_cutoff`
    is used and its outcome recorded in ``converged``. ``curve`` holds the
    running integral on the lag grid so callers can inspect the plateau.
    """
    converged = True
    if cutoff is None:
        cutoff, converged = plateau_cutoff(vacf)
    cutoff = float(cutoff)
    if cutoff > vacf.max_lag * (1 + 1e-12):
        raise MaxLagError(cutoff, vacf.max_lag)
    return Integral(
        value=_integral_to(vacf, cutoff),
        stderr=_block_err(vacf, lambda b: _integral_to(b, cutoff)),
        cutoff=cutoff,
        converged=converged,
        curve=running_integral(vacf),
    )


def _d_plus_value(vacf: Vacf) -> float:
    return _integral_to(vacf, first_zero(vacf))


def d_plus(vacf: Vacf) -> Integral:
    """``int_0^{t_v} G_v dt``; the full window when ``t_v`` is infinite."""
    tv = first_zero(vacf)
    return Integral(
        value=_d_plus_value(vacf),
        stderr=_block_err(vacf, _d_plus_value),
        cutoff=min(tv, vacf.max_lag),
        converged=math.isfinite(tv),
    )


def max_slope(vacf: Vacf, window: Optional[float] = None, smooth: bool = False,
              smooth_window: int = 7, smooth_order: int = 3) -> float:
    """``max |dG_v/dt|`` over ``[0, t_v]`` from two-point differences.

    The search ends at the sample bracketing ``t_v``; with no sign change it
    covers ``[0, window]`` (default: the whole lag window). ``smooth`` applies
    a local polynomial (Savitzky-Golay) filter before differencing.
    """
    g = vacf.values
    if smooth:
        g = savgol_filter(g, smooth_window, smooth_order, mode="interp")
    tv = first_zero(vacf)
    end = tv if math.isfinite(tv) else (vacf.max_lag if window is None else window)
    k_end = int(np.searchsorted(vacf.lags, end, side="left"))
    k_end = min(max(k_end, 1), g.size - 1)
    slopes = np.abs(np.diff(g[: k_end + 1]) / np.diff(vacf.lags[: k_end + 1]))
    return float(slopes.max())


def _triangle_value(vacf: Vacf, window=None, smooth=False) -> float:
    s = max_slope(vacf, window, smooth)
    if not s > 0:
        raise ValueError("G_v has zero slope; triangle bound undefined")
    return vacf.g0**2 / (2.0 * s)


def triangle_bound(vacf: Vacf, window: Optional[float] = None, smooth: bool = False) -> float:
    """``G_v(0)^2 / (2 max|dG_v/dt|)``, a lower bound on ``D+``."""
    return _triangle_value(vacf, window, smooth)


def msd_curve(positions, nlag: int) -> np.ndarray:
    """Origin-averaged single-component MSD for lags ``0..nlag`` (FFT algorithm)."""
    r = np.asarray(positions, dtype=float)
    ns = r.shape[0]
    x = r.reshape(ns, -1)
    m = x.shape[1]
    sq = np.einsum("ij,ij->i", x, x)
    # sum_t |r(t+k) - r(t)|^2 = S1(k) - 2 * sum_t r(t) r(t+k)
    cross = _autocorr_fft(x, nlag)
    s1 = np.empty(nlag + 1)
    total = 2.0 * sq.sum()
    for k in range(nlag + 1):
        if k > 0:
            total -= sq[k - 1] + sq[ns - k]
        s1[k] = total
    counts = (ns - np.arange(nlag + 1)) * m
    return (s1 - 2.0 * cross) / counts


def _msd_slope(positions, dt, eval_time):
    k = int(round(eval_time / dt))
    k = max(k, 1)
    msd = msd_curve(positions, k + 1)
    return (msd[k + 1] - msd[k - 1]) / (4.0 * dt)


def msd_diffusion(traj: Trajectory, eval_time: float, n_blocks: int = 8) -> tuple[float, float]:
    """``(1/2) d<dr^2>/dt`` at ``eval_time`` by central differences.

    Returns ``(value, stderr)``. ``traj.positions`` must be unwrapped.
    """
    if getattr(traj, "positions", None) is None:
        raise ValueError("trajectory has no positions; MSD analysis unavailable")
    dt = traj.sample_interval
    pos = traj.positions
    ns = pos.shape[0]
    k = max(int(round(eval_time / dt)), 1)
    if k + 1 > (ns - 1) // 2:
        raise MaxLagError(eval_time, ((ns - 1) // 2 - 1) * dt)
    value = float(_msd_slope(pos, dt, eval_time))
    slices = _block_slices(ns, k + 1, n_blocks)
    if slices:
        vals = np.array([_msd_slope(pos[s], dt, eval_time) for s in slices])
        err = float(vals.std(ddof=1) / math.sqrt(len(slices)))
    else:
        err = float("nan")
    return value, err


def analyze(source, max_lag: Optional[float] = None, gk_cutoff: Optional[float] = None,
            method: str = "fft", n_blocks: int = 8, smooth: bool = False) -> tuple[Vacf, TransportEstimate]:
    """Full VACF pipeline on a trajectory or a precomputed :class:`Vacf`.

    The MSD cross-check (evaluated at ``t_v``) runs only when positions are
    available and ``t_v`` is finite.
    """
    if isinstance(source, Vacf):
        vacf = source
        traj = None
    else:
        traj = source
        if max_lag is None:
            max_lag = ((traj.n_samples - 1) // 2) * traj.sample_interval
        vacf = estimate_vacf(traj, max_lag, method=method, n_blocks=n_blocks)

    tv = first_zero(vacf)
    gk = green_kubo_D(vacf, gk_cutoff)
    dp = d_plus(vacf)
    slope = max_slope(vacf, smooth=smooth)
    tri = _triangle_value(vacf, smooth=smooth)
    tri_err = _block_err(vacf, lambda b: _triangle_value(b, smooth=smooth))
    msd_D = msd_err = None
    if traj is not None and traj.positions is not None and math.isfinite(tv):
        try:
            msd_D, msd_err = msd_diffusion(traj, tv, n_blocks)
        except MaxLagError:
            pass
    est = TransportEstimate(
        D=gk.value, D_err=gk.stderr, D_plus=dp.value, D_plus_err=dp.stderr,
        t_v=tv, slope_max=slope, triangle_bound=tri, triangle_bound_err=tri_err,
        gk_cutoff=gk.cutoff, gk_converged=gk.converged, msd_D=msd_D, msd_D_err=msd_err,
    )
    return vacf, est


class VACFEstimator(BaseEstimator):
    """Estimator wrapper around :func:`analyze`.

    Parameters
    ----------
    max_lag : float, optional
        Lag window; defaults to half of the sampled window.
    gk_cutoff : float, optional
        Green-Kubo upper limit; defaults to the plateau rule.
    method : {"fft", "direct"}
    n_blocks : int
    smooth : bool
        Smooth ``G_v`` before the slope search.

    Attributes
    ----------
    vacf_ : Vacf
    transport_ : TransportEstimate
    D_, D_plus_, t_v_, triangle_bound_ : float
    """

    def __init__(self, max_lag=None, gk_cutoff=None, method="fft", n_blocks=8, smooth=False):
        self.max_lag = max_lag
        self.gk_cutoff = gk_cutoff
        self.method = method
        self.n_blocks = n_blocks
        self.smooth = smooth

    def fit(self, X, y=None, sample_interval=None):
        """Fit on a :class:`Trajectory`, a :class:`Vacf`, or a velocity array.

        A raw array of shape ``(n_samples, n_particles, d)`` needs
        ``sample_interval``.
        """
        if not isinstance(X, (Trajectory, Vacf)):
            if sample_interval is None:
                raise ValueError("sample_interval is required for raw velocity arrays")
            v = np.asarray(X, dtype=float)
            if v.ndim == 2:
                v = v[:, :, None]
            X = Trajectory(times=np.arange(v.shape[0]) * float(sample_interval), velocities=v)
        self.vacf_, self.transport_ = analyze(
            X, self.max_lag, self.gk_cutoff, self.method, self.n_blocks, self.smooth
        )
        self.D_ = self.transport_.D
        self.D_plus_ = self.transport_.D_plus
        self.t_v_ = self.transport_.t_v
        self.triangle_bound_ = self.transport_.triangle_bound
        return self

    def transform(self, X=None):
        """Return the fitted ``(lags, G_v)`` as a two-column array."""
        if not hasattr(self, "vacf_"):
            raise NotFittedError("VACFEstimator is not fitted yet")
        return np.column_stack([self.vacf_.lags, self.vacf_.values])

    def fit_transform(self, X, y=None, **fit_params):
        return self.fit(X, y, **fit_params).transform()


def write_vacf(vacf: Vacf, path) -> Path:
    """CSV with ``# key: value`` header lines and ``lag,value[,stderr]`` columns."""
    path = Path(path)
    cols = {"lag": vacf.lags, "value": vacf.values}
    if vacf.stderr is not None:
        cols["stderr"] = vacf.stderr
    with open(path, "w", newline="") as fh:
        fh.write(f"# format_version: {FORMAT_VERSION}\n")
        fh.write("# kind: vacf\n")
        fh.write(f"# n_origins: {vacf.n_origins}\n")
        fh.write(f"# per_component: {json.dumps(vacf.per_component)}\n")
        pd.DataFrame(cols).to_csv(fh, index=False, float_format="%.17g")
    return path


def read_vacf(path) -> Vacf:
    """Read a VACF CSV (header lines optional; needs ``lag`` and ``value`` columns)."""
    text = Path(path).read_text()
    meta, nhead = read_header(io.StringIO(text))
    if meta.get("format_version", FORMAT_VERSION) != FORMAT_VERSION:
        raise ValueError(f"unsupported format_version {meta['format_version']!r}")
    if meta.get("kind", "vacf") != "vacf":
        raise ValueError(f"expected a vacf file, got kind={meta['kind']!r}")
    df = pd.read_csv(io.StringIO(text), skiprows=nhead, float_precision="round_trip")
    if "lag" not in df.columns or "value" not in df.columns:
        raise ValueError("VACF CSV needs 'lag' and 'value' columns")
    if df[["lag", "value"]].isna().any().any():
        raise ValueError("VACF CSV has missing values")
    stderr = df["stderr"].to_numpy() if "stderr" in df.columns else None
    return Vacf(
        lags=df["lag"].to_numpy(),
        values=df["value"].to_numpy(),
        n_origins=int(meta.get("n_origins", 1)),
        per_component=bool(meta.get("per_component", True)),
        stderr=stderr,
    )
