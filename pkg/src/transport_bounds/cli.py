"""
Batch command-line front end.

Subcommands: ``simulate``, ``vacf``, ``bounds``, ``scan``, ``mbcheck``.

Exit codes: 0 success, 2 invalid input, 3 numerical failure. Every command
that writes files also writes a JSON manifest listing them.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from . import bounds, thermo
from .mdsim import (
    ConfigError,
    InsufficientStatisticsError,
    MomentStats,
    SimConfig,
    SimulationBlowUp,
    TrajectoryFormatError,
    read_trajectory,
    run,
    write_trajectory,
)
from .units import CONSTANT_SET_VERSION, Quantity, convert
from .vacf import MaxLagError, analyze, read_vacf, write_vacf

logger = logging.getLogger("transport_bounds")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3


class InputError(Exception):
    """Bad user input; maps to exit code 2."""


BUNDLED_CONFIGS = ("lj_fig3", "yukawa_fig2")


def bundled_config(name: str) -> Path:
    return Path(str(resources.files("transport_bounds").joinpath(f"configs/{name}.yaml")))


def _file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class Manifest:
    def __init__(self, argv):
        self.data = {
            "command": list(argv),
            "config_digest": None,
            "constant_set": CONSTANT_SET_VERSION,
            "seeds": {},
            "outputs": [],
            "notes": [],
        }
        self._t0 = time.perf_counter()

    def add_output(self, path):
        self.data["outputs"].append(str(path))

    def note(self, text):
        self.data["notes"].append(text)

    def write(self, path) -> Path:
        self.data["duration_s"] = round(time.perf_counter() - self._t0, 3)
        missing = [p for p in self.data["outputs"] if not Path(p).exists()]
        if missing:
            raise RuntimeError(f"manifest lists missing outputs: {missing}")
        path = Path(path)
        path.write_text(json.dumps(self.data, indent=2, sort_keys=True) + "\n")
        return path


def _load_document(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise InputError(f"{path}: no such file")
    try:
        with open(path) as fh:
            docs = list(yaml.safe_load_all(fh))
    except yaml.YAMLError as exc:
        raise InputError(f"{path}: not valid YAML/JSON: {exc}") from None
    if len(docs) != 1:
        raise InputError(f"{path}: expected exactly one document, found {len(docs)}")
    doc = docs[0]
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top level must be a mapping")
    return doc


def _write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n")
    return path


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return _jsonable(x.item())
    return x


# ---------------------------------------------------------------- simulate


def cmd_simulate(args, argv) -> int:
    cfg_path = bundled_config(args.config) if args.config in BUNDLED_CONFIGS else Path(args.config)
    raw = _load_document(cfg_path)
    manifest = Manifest(argv)
    if args.seed is not None:
        raw["seed"] = args.seed
    elif "seed" not in raw:
        raw["seed"] = 0
        manifest.note("no seed in config; using default seed 0")
    config = SimConfig.from_dict(raw)
    manifest.data["config_digest"] = config.digest()
    manifest.data["seeds"] = {"simulation": config.seed}
    manifest.data["config"] = config.to_dict()

    out = Path(args.out) if args.out else Path(f"{cfg_path.stem}.{args.format}")
    out.parent.mkdir(parents=True, exist_ok=True)
    traj = run(config)
    write_trajectory(traj, out)
    manifest.add_output(out)
    mpath = manifest.write(out.with_name(out.name + ".manifest.json"))
    print(f"wrote {out} ({traj.n_samples} samples) and {mpath}")
    return EXIT_OK


# -------------------------------------------------------------------- vacf


def _read_source(path: Path):
    """Trajectory or VACF file, told apart by the ``kind`` header."""
    from .mdsim.trajectory import read_header

    if path.suffix == ".npz":
        return read_trajectory(path)
    with open(path) as fh:
        meta, _ = read_header(fh)
    if meta.get("kind") == "vacf":
        try:
            return read_vacf(path)
        except (ValueError, KeyError) as exc:
            raise InputError(f"{path}: {exc}") from None
    return read_trajectory(path)


def cmd_vacf(args, argv) -> int:
    src = Path(args.input)
    if not src.exists():
        raise InputError(f"{src}: no such file")
    manifest = Manifest(argv)
    manifest.data["config_digest"] = _file_digest(src)
    source = _read_source(src)
    vacf, est = analyze(
        source, max_lag=args.max_lag, gk_cutoff=args.gk_cutoff, method=args.method,
        n_blocks=args.blocks, smooth=args.smooth,
    )
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    vpath = write_vacf(vacf, outdir / "vacf.csv")
    summary = est.as_dict()
    if hasattr(source, "positions") and source.positions is not None:
        summary["msd_note"] = "MSD slope evaluated at t_v"
    else:
        summary["msd_note"] = "no positions in input; MSD cross-check not available"
        summary.pop("msd_D")
        summary.pop("msd_D_err")
    if not est.gk_converged:
        summary["gk_note"] = "running integral did not plateau; D uses the full window"
    spath = _write_json(outdir / "transport.json", _jsonable(summary))
    manifest.add_output(vpath)
    manifest.add_output(spath)
    manifest.write(outdir / "manifest.json")
    rel = est.relative_difference
    print(f"D = {est.D:.6g} +/- {est.D_err:.2g}   D+ = {est.D_plus:.6g}   "
          f"t_v = {est.t_v:.6g}   (D+ - D)/D = {rel:+.1%}")
    return EXIT_OK


# ------------------------------------------------------------------ bounds


def _parse_value(raw, key, si_unit):
    """Number (SI), ``{value, unit}`` mapping, or ``"<number> <unit>"``."""
    if isinstance(raw, bool):
        raise InputError(f"{key}: expected a number")
    if isinstance(raw, (int, float)):
        return float(raw)
    if isinstance(raw, dict) and "value" in raw:
        value, unit = raw["value"], raw.get("unit", si_unit)
    elif isinstance(raw, str) and len(raw.split()) == 2:
        value, unit = raw.split()
    else:
        raise InputError(f"{key}: cannot interpret {raw!r}")
    try:
        return convert(Quantity(float(value), unit), si_unit).value
    except (KeyError, ValueError) as exc:
        raise InputError(f"{key}: {exc}") from None


def _parse_mass(raw, registry) -> float:
    if isinstance(raw, str) and len(raw.split()) == 1:
        key = raw.strip()
        for sym in registry:
            spec = registry[sym]
            if key.lower() in (sym.lower(), spec.long_name.lower()):
                return spec.mass
        raise InputError(f"m: unknown fluid {raw!r}")
    return _parse_value(raw, "m", "kg")


def _parse_moments(raw) -> MomentStats:
    if not isinstance(raw, dict):
        raise InputError("moments: expected a mapping with var_Vi and fourth_Vi (J^2, J^4)")
    try:
        var = float(raw["var_Vi"])
        fourth = float(raw["fourth_Vi"])
    except (KeyError, TypeError, ValueError):
        raise InputError("moments: need numeric var_Vi and fourth_Vi") from None
    try:
        return MomentStats(
            mean_Vi=float(raw.get("mean_Vi", 0.0)), var_Vi=var, fourth_Vi=fourth,
            mean_Ki=float(raw.get("mean_Ki", float("nan"))), sigma_Vi=math.sqrt(var),
            n_samples=int(raw.get("n_samples", 0)),
        )
    except ValueError as exc:
        raise InputError(f"moments: {exc}") from None


def evaluate_params(params: dict, registry=None) -> bounds.BoundSet:
    registry = registry or thermo.default_registry()
    known = {"m", "T", "n", "moments", "sigma", "d", "mean_K"}
    unknown = sorted(set(params) - known)
    if unknown:
        raise InputError(f"unknown parameter(s): {', '.join(unknown)}")
    kw = {}
    if "m" in params:
        kw["m"] = _parse_mass(params["m"], registry)
    if "T" in params:
        kw["T"] = _parse_value(params["T"], "T", "K")
    if "n" in params:
        kw["n"] = _parse_value(params["n"], "n", "1/m3")
    if "sigma" in params:
        kw["sigma"] = _parse_value(params["sigma"], "sigma", "J")
    if "mean_K" in params:
        kw["mean_K"] = _parse_value(params["mean_K"], "mean_K", "J")
    if "d" in params:
        d = params["d"]
        if d not in (1, 2, 3):
            raise InputError("d: must be 1, 2 or 3")
        kw["d"] = d
    if "moments" in params:
        kw["moments"] = _parse_moments(params["moments"])
    try:
        result = bounds.evaluate_bounds(**kw)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if not result.evaluated():
        raise InputError("no bound can be evaluated from the supplied parameters")
    return result


def cmd_bounds(args, argv) -> int:
    params = _load_document(args.params)
    result = evaluate_params(params)
    doc = {
        "constant_set": CONSTANT_SET_VERSION,
        "bounds": result.evaluated(),
        "omitted": result.omitted,
    }
    if result.d_bound_chaos_alt is not None:
        doc["notes"] = {"d_bound_chaos_alt": "alternative constant hbar/(2 sqrt(d) m), externally sourced"}
    text = json.dumps(_jsonable(doc), indent=2, sort_keys=True)
    if args.out:
        manifest = Manifest(argv)
        manifest.data["config_digest"] = _file_digest(args.params)
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text + "\n")
        manifest.add_output(out)
        manifest.write(out.with_name(out.name + ".manifest.json"))
    print(text)
    return EXIT_OK


# -------------------------------------------------------------------- scan


def cmd_scan(args, argv) -> int:
    data_dir = Path(args.data_dir) if args.data_dir else thermo.fixture_dir()
    if args.registry:
        registry = thermo.FluidRegistry.from_json(args.registry)
    else:
        registry = thermo.default_registry()
    manifest = Manifest(argv)
    if not data_dir.is_dir():
        raise InputError(f"{data_dir} is not a directory")
    inputs = sorted(data_dir.glob("*.csv"))
    digest = hashlib.sha256()
    for p in inputs:
        digest.update(p.name.encode())
        digest.update(_file_digest(p).encode())
    manifest.data["config_digest"] = digest.hexdigest()
    manifest.data["data_dir"] = str(data_dir)
    manifest.data["registry_version"] = registry.version
    datasets = thermo.load_datasets(data_dir, registry)
    report = thermo.build_report(datasets, registry)
    for w in report.warnings:
        manifest.note(w)
    outdir = Path(args.outdir)
    for p in report.write(outdir):
        manifest.add_output(p)
    manifest.write(outdir / "manifest.json")
    n_viol = sum(r.violated for t in report.tables.values() for r in t.rows)
    print(f"{len(datasets)} dataset(s), {len(report.tables)} table(s), {n_viol} bound violation(s); "
          f"output in {outdir}")
    return EXIT_OK


# ----------------------------------------------------------------- mbcheck


def cmd_mbcheck(args, argv) -> int:
    m = _parse_mass(args.mass, thermo.default_registry())
    if args.samples < 10_000:
        raise InputError("--samples must be at least 10000")
    res = bounds.mb_inverse_p2_check(m, args.temperature, n_samples=args.samples, seed=args.seed,
                                     method=args.method)
    doc = {
        "m_kg": m,
        "T_K": args.temperature,
        "n_samples": res.n_samples,
        "seed": args.seed,
        "method": res.method,
        "estimate": res.estimate,
        "stderr": res.stderr,
        "expected": res.expected,
        "z": res.z,
    }
    print(json.dumps(doc, indent=2, sort_keys=True))
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="transport-bounds", description=__doc__.strip().splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run MD from a YAML config and write a trajectory")
    s.add_argument("config", help=f"config file, or a bundled name: {', '.join(BUNDLED_CONFIGS)}")
    s.add_argument("-o", "--out", help="trajectory path (.npz or .csv)")
    s.add_argument("--format", choices=("npz", "csv"), default="npz", help="used when --out is absent")
    s.add_argument("--seed", type=int, help="override the config seed")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("vacf", help="VACF, Green-Kubo D, D+, t_v and triangle bound")
    s.add_argument("input", help="trajectory (.npz/.csv) or VACF CSV")
    s.add_argument("--max-lag", type=float, help="longest lag in time units")
    s.add_argument("--gk-cutoff", type=float, help="upper limit of the Green-Kubo integral")
    s.add_argument("--method", choices=("fft", "direct"), default="fft")
    s.add_argument("--blocks", type=int, default=8, help="time blocks for standard errors")
    s.add_argument("--smooth", action="store_true", help="smooth before taking the maximum slope")
    s.add_argument("-o", "--outdir", default="vacf_out")
    s.set_defaults(func=cmd_vacf)

    s = sub.add_parser("bounds", help="evaluate every bound computable from a parameter file")
    s.add_argument("params", help="YAML/JSON mapping with any of m, T, n, moments, sigma, d, mean_K")
    s.add_argument("-o", "--out", help="also write the JSON here")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("scan", help="minimum-value tables from fluid property CSVs")
    s.add_argument("data_dir", nargs="?",
                   help=f"directory of CSVs (default: bundled fixtures or ${thermo.FIXTURE_ENV})")
    s.add_argument("--registry", help="kinetic-diameter registry JSON")
    s.add_argument("-o", "--outdir", default="scan_out")
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("mbcheck", help="Monte-Carlo check of the thermal average of h m/p^2")
    s.add_argument("-m", "--mass", required=True, help="mass in kg, '<value> <unit>', or a fluid name")
    s.add_argument("-T", "--temperature", type=float, required=True, help="kelvin")
    s.add_argument("-n", "--samples", type=int, default=1_000_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--method", choices=("defensive", "naive"), default="defensive")
    s.set_defaults(func=cmd_mbcheck)
    return p


_INPUT_ERRORS = (
    InputError,
    ConfigError,
    TrajectoryFormatError,
    MaxLagError,
    InsufficientStatisticsError,
    thermo.FluidTableError,
    thermo.RegistryError,
    thermo.ScanError,
    FileNotFoundError,
    IsADirectoryError,
)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args, ["transport-bounds", *argv])
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SimulationBlowUp, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
