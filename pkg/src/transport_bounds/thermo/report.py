"""Bound-ratio tables and ratio curves from a collection of iso-scans."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .fluids import FluidRegistry, RegistryError
from .scan import ScanQuantity, ScanResult, quantity_values, scan_minimum
from .tables import IsoDataset, Mode

logger = logging.getLogger(__name__)

QUANTITY_UNITS = {
    ScanQuantity.D_SER: "m2/s",
    ScanQuantity.ETA: "Pa*s",
    ScanQuantity.ETA_OVER_NH: "1",
    ScanQuantity.NU: "m2/s",
}
TABLE_COLUMNS = ["system", "min_value", "ratio", "T_K", "P_MPa", "violated"]
CURVE_COLUMNS = ["T_K", "P_MPa", "phase", "value", "ratio"]


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.4g}"
    return str(x)


@dataclass
class Table:
    quantity: ScanQuantity
    mode: Mode
    phase: str
    rows: list[ScanResult] = field(default_factory=list)

    @property
    def name(self) -> str:
        return f"{self.quantity.value}_min_{self.mode.value}_{self.phase}"

    def to_json(self) -> dict:
        return {
            "table": self.name,
            "quantity": self.quantity.value,
            "unit": QUANTITY_UNITS[self.quantity],
            "mode": self.mode.value,
            "phase": self.phase,
            "rows": [r.as_row() for r in self.rows],
        }


@dataclass
class Curve:
    dataset: str
    quantity: ScanQuantity
    rows: list[dict]

    @property
    def name(self) -> str:
        return f"{self.dataset}_{self.quantity.value}"


@dataclass
class BoundReport:
    tables: dict[str, Table] = field(default_factory=dict)
    curves: list[Curve] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    registry_version: str = ""

    def table(self, name: str) -> Table:
        return self.tables[name]

    def row(self, table: str, system: str) -> ScanResult:
        for r in self.tables[table].rows:
            if r.fluid == system:
                return r
        raise KeyError(f"{system} not in {table}")

    def write(self, outdir) -> list[Path]:
        """Write every table as CSV + JSON and every curve as CSV.

        CSV numbers carry 4 significant digits, JSON full precision. Output
        is byte-identical for identical inputs.
        """
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        for name in sorted(self.tables):
            t = self.tables[name]
            p = out / f"{name}.csv"
            with open(p, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(TABLE_COLUMNS)
                for r in t.rows:
                    row = r.as_row()
                    w.writerow([_fmt(row[c]) for c in TABLE_COLUMNS])
            paths.append(p)
            p = out / f"{name}.json"
            p.write_text(json.dumps(t.to_json(), indent=2, sort_keys=True) + "\n")
            paths.append(p)
        if self.curves:
            cdir = out / "curves"
            cdir.mkdir(exist_ok=True)
            for c in self.curves:
                p = cdir / f"{c.name}.csv"
                with open(p, "w", newline="") as fh:
                    w = csv.writer(fh, lineterminator="\n")
                    w.writerow(CURVE_COLUMNS)
                    for row in c.rows:
                        w.writerow([_fmt(row[k]) for k in CURVE_COLUMNS])
                paths.append(p)
        index = {
            "registry_version": self.registry_version,
            "tables": sorted(self.tables),
            "curves": [c.name for c in self.curves],
            "warnings": self.warnings,
        }
        p = out / "index.json"
        p.write_text(json.dumps(index, indent=2, sort_keys=True) + "\n")
        paths.append(p)
        return paths


def build_report(datasets: list[IsoDataset], registry: FluidRegistry) -> BoundReport:
    """Scan every dataset for the minimum of each quantity, per phase.

    Rows of each table follow registry order, then the fixed coordinate.
    Ratios below one are flagged as violations; they are data, not errors.
    """
    report = BoundReport(registry_version=registry.version)
    if not datasets:
        report.warnings.append("no datasets supplied; report is empty")
        logger.warning(report.warnings[-1])
        return report
    for ds in datasets:
        if ds.fluid.name not in registry:
            raise RegistryError(f"fluid {ds.fluid.name!r} is not in the registry")
    ordered = sorted(datasets, key=lambda d: (registry.order(d.fluid.name), d.mode.value, d.fixed_value))
    for ds in ordered:
        if not ds.records:
            report.warnings.append(f"{ds.label}: no usable records")
            continue
        report.warnings.extend(f"{ds.label}: {n}" for n in ds.notes)
        a = ds.arrays()
        for q in ScanQuantity:
            for phase in ds.phases:
                res = scan_minimum(ds, q, phase)
                key = Table(q, ds.mode, phase.value)
                report.tables.setdefault(key.name, key).rows.append(res)
            vals, ratios = quantity_values(a["T"], a["rho"], a["eta"], ds.fluid, q)
            rows = [
                {"T_K": float(a["T"][i]), "P_MPa": float(a["P"][i]), "phase": r.phase.value,
                 "value": float(vals[i]), "ratio": float(ratios[i])}
                for i, r in enumerate(ds.records)
            ]
            report.curves.append(Curve(ds.label, q, rows))
    return report
