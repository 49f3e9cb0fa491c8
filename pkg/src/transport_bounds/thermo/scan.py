"""SER diffusion, per-record transport quantities and grid-minimum scans."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .. import bounds
from ..units import CONSTANTS
from .fluids import FluidSpec
from .tables import IsoDataset, Phase


class ScanQuantity(str, Enum):
    D_SER = "D_ser"
    ETA = "eta"
    ETA_OVER_NH = "eta_over_nh"
    NU = "nu"


class ScanError(ValueError):
    pass


def ser_diffusion(T: float, eta: float, R: float) -> float:
    """Stokes-Einstein diffusion constant ``kB T / (6 pi eta R)``."""
    for name, v in (("T", T), ("eta", eta), ("R", R)):
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v!r}")
    return CONSTANTS.kB * T / (6.0 * math.pi * eta * R)


def quantity_values(T, rho, eta, fluid: FluidSpec, quantity) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate ``quantity`` and its ratio to the matching bound, elementwise.

    Inputs are SI arrays (K, kg/m^3, Pa s). Returns ``(values, ratios)``.
    """
    q = ScanQuantity(quantity)
    T, rho, eta = (np.asarray(a, dtype=float) for a in (T, rho, eta))
    n = rho * CONSTANTS.NA / fluid.molar_mass
    if q is ScanQuantity.D_SER:
        vals = CONSTANTS.kB * T / (6.0 * math.pi * eta * fluid.radius)
        return vals, vals / bounds.diffusion_bound_chaos(fluid.mass)
    if q is ScanQuantity.ETA:
        return eta, eta / (n * CONSTANTS.h)
    if q is ScanQuantity.ETA_OVER_NH:
        r = eta / (n * CONSTANTS.h)
        return r, r
    nu = eta / rho
    return nu, nu / bounds.kinematic_viscosity_bound(fluid.mass)


@dataclass(frozen=True)
class ScanResult:
    fluid: str
    quantity: ScanQuantity
    phase: Optional[Phase]
    min_value: float
    ratio_to_bound: float
    at_T: float
    at_P: float
    index: int

    @property
    def violated(self) -> bool:
        return self.ratio_to_bound < 1.0

    def as_row(self) -> dict:
        return {
            "system": self.fluid,
            "min_value": self.min_value,
            "ratio": self.ratio_to_bound,
            "T_K": self.at_T,
            "P_MPa": self.at_P,
            "violated": self.violated,
        }


def scan_minimum(ds: IsoDataset, quantity, phase_filter=None) -> ScanResult:
    """Grid minimum of ``quantity`` over the records of ``ds``.

    ``phase_filter`` restricts the scan to one phase; ``None`` scans all
    records. No interpolation is done between grid points.
    """
    q = ScanQuantity(quantity)
    phase = None if phase_filter in (None, "all") else Phase.parse(phase_filter)
    idx = [i for i, r in enumerate(ds.records) if phase is None or r.phase is phase]
    if not idx:
        what = f" with phase {phase.value}" if phase else ""
        raise ScanError(f"{ds.label}: no records{what}")
    a = ds.arrays()
    sel = np.array(idx)
    vals, ratios = quantity_values(a["T"][sel], a["rho"][sel], a["eta"][sel], ds.fluid, q)
    k = int(np.argmin(vals))
    i = idx[k]
    return ScanResult(
        fluid=ds.fluid.name,
        quantity=q,
        phase=phase,
        min_value=float(vals[k]),
        ratio_to_bound=float(ratios[k]),
        at_T=float(a["T"][i]),
        at_P=float(a["P"][i]),
        index=i,
    )


class BoundRatioTransformer(TransformerMixin, BaseEstimator):
    """Map state points to a transport quantity in units of its bound.

    ``X`` columns are temperature (K), mass density (kg/m^3) and shear
    viscosity (Pa s). ``transform`` returns one ratio per row.

    Parameters
    ----------
    fluid : FluidSpec
    quantity : {"D_ser", "eta", "eta_over_nh", "nu"}
    """

    def __init__(self, fluid: Optional[FluidSpec] = None, quantity: str = "eta_over_nh"):
        self.fluid = fluid
        self.quantity = quantity

    def fit(self, X, y=None):
        if not isinstance(self.fluid, FluidSpec):
            raise ValueError("fluid must be a FluidSpec")
        self.quantity_ = ScanQuantity(self.quantity)
        X = self._check(X)
        self.n_features_in_ = X.shape[1]
        return self

    def _check(self, X):
        X = check_array(X, dtype=float)
        if X.shape[1] != 3:
            raise ValueError(f"expected 3 columns (T, rho, eta), got {X.shape[1]}")
        if np.any(X <= 0):
            raise ValueError("temperatures, densities and viscosities must be positive")
        return X

    def transform(self, X):
        check_is_fitted(self, "quantity_")
        X = self._check(X)
        _, ratios = quantity_values(X[:, 0], X[:, 1], X[:, 2], self.fluid, self.quantity_)
        return ratios[:, None]
