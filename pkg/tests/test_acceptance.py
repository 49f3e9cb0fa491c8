"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``.
"""

import dataclasses
import math
import sys
import time

import numpy as np
import pytest
import yaml

from transport_bounds import bounds
from transport_bounds.cli import bundled_config
from transport_bounds.mdsim import (
    LennardJones,
    NoThermostat,
    SimConfig,
    init_state,
    moment_stats_from_samples,
    run,
    sample_harmonic_potentials,
    step,
)
from transport_bounds.mdsim.engine import equilibrate
from transport_bounds.thermo import build_report, default_registry, fixture_dir, load_datasets, ser_diffusion
from transport_bounds.units import CONSTANTS
from transport_bounds.vacf import analyze, autocorrelation, vacf_from_function

REG = default_registry()

# published liquid-phase SER minima at one atmosphere: D_min (m^2/s) and its ratio to hbar/(2 pi m)
LIQUID_D_MIN = {
    "Ar": (1.244e-9, 4.916),
    "CH4": (1.803e-9, 2.861),
    "CO": (9.100e-10, 2.521),
    "H2O": (8.431e-10, 1.503),
    "H2": (2.747e-9, 0.5478),
    "He": (3.248e-9, 1.286),
    "N2": (8.147e-10, 2.258),
    "NH3": (1.930e-9, 3.251),
    "O2": (2.973e-10, 0.9411),
}


def _line(n, ok, detail):
    return f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.fixture
def emit(capsys):
    def _emit(n, ok, detail):
        with capsys.disabled():
            print("\n" + _line(n, ok, detail))
        assert ok, detail
    return _emit


@pytest.fixture(scope="module")
def report():
    return build_report(load_datasets(fixture_dir(), REG), REG)


def _load(name):
    return SimConfig.from_dict(yaml.safe_load(bundled_config(name).read_text()))


# ---------------------------------------------------------------------------

def check_1():
    worst, who = 0.0, ""
    for fluid, (d_min, printed) in LIQUID_D_MIN.items():
        ratio = d_min / bounds.diffusion_bound_chaos(REG[fluid].mass)
        err = abs(ratio / printed - 1)
        if err > worst:
            worst, who = err, fluid
    return worst <= 3e-3, f"bound-constant ratios, worst {who} off by {worst:.3%} (tol 0.3%)"


def check_2():
    D = ser_diffusion(83.81, 290.2e-6, REG["Ar"].radius)
    err = abs(D / 1.244e-9 - 1)
    return err <= 1e-3, f"SER Ar D = {D:.5g} m2/s vs 1.244e-9, off by {err:.3%} (tol 0.1%)"


def check_3(report):
    cases = [
        ("eta_min_isobaric_liquid", "Ar", 18.67, False),
        ("eta_min_isobaric_liquid", "He", 0.2539, True),
        ("eta_min_isobaric_vapor", "He", 0.7397, True),
    ]
    parts, ok = [], True
    for table, fluid, printed, violated in cases:
        r = report.row(table, fluid)
        err = abs(r.ratio_to_bound / printed - 1)
        ok &= err <= 5e-3 and r.violated == violated
        parts.append(f"{fluid} {r.phase.value} {r.ratio_to_bound:.4g}{' (violation)' if r.violated else ''}")
    return ok, "eta/(n h) minima: " + ", ".join(parts)


def check_4(report):
    cases = [("Ar", 100.0, 7.684, False), ("H2", 50.0, 0.8147, True)]
    parts, ok = [], True
    rows = report.table("nu_min_isobaric_supercritical").rows
    for fluid, p, printed, violated in cases:
        r = next(r for r in rows if r.fluid == fluid and math.isclose(r.at_P, p))
        err = abs(r.ratio_to_bound / printed - 1)
        ok &= err <= 5e-3 and r.violated == violated
        parts.append(f"{fluid}@{p:g} MPa {r.ratio_to_bound:.4g} ({err:.2%})")
    return ok, "kinematic minima: " + ", ".join(parts)


def check_5():
    t0 = time.perf_counter()
    vacf = vacf_from_function(lambda t: np.exp(-t) * np.cos(t), 1e-3, 80.0)
    _, est = analyze(vacf)
    elapsed = time.perf_counter() - t0
    d_plus_exact = 0.5 * (1 + math.exp(-math.pi / 2))
    ok = (
        abs(est.t_v - math.pi / 2) <= 1e-3
        and abs(est.D - 0.5) <= 1e-3
        and abs(est.D_plus - d_plus_exact) <= 1e-3
        and abs(est.triangle_bound / 0.5 - 1) <= 1e-2
        and est.triangle_bound <= est.D_plus
        and elapsed < 1.0
    )
    return ok, (f"synthetic VACF t_v={est.t_v:.5f} D={est.D:.5f} D+={est.D_plus:.5f} "
                f"triangle={est.triangle_bound:.5f} ({elapsed:.2f} s)")


def check_6():
    cfg = _load("lj_fig3")
    t0 = time.perf_counter()
    traj = run(cfg)
    vacf, est = analyze(traj, max_lag=5.0)
    elapsed = time.perf_counter() - t0
    rel = est.relative_difference
    dip = float(vacf.values.min())
    ok = cfg.n_particles >= 500 and cfg.n_prod_steps >= 200_000 and dip < 0 and 0.35 <= rel <= 0.65
    return ok, (f"LJ N={cfg.n_particles} rho={cfg.number_density} T={cfg.temperature}: min G={dip:.3g}, "
                f"t_v={est.t_v:.3f}, (D+ - D)/D = {rel:+.1%} (target +50% +/- 15) [{elapsed:.0f} s]")


def check_7():
    cfg = _load("yukawa_fig2")
    t0 = time.perf_counter()
    traj = run(cfg)
    vacf, est = analyze(traj)
    elapsed = time.perf_counter() - t0
    g = vacf.values
    crossings = int(np.count_nonzero(np.diff(np.sign(g[: int(5 / vacf.dt)])) != 0))
    rel = est.relative_difference
    ok = crossings >= 2 and rel < 0
    return ok, (f"magnetized 2D Yukawa: {crossings} sign changes before t=5, "
                f"(D+ - D)/D = {rel:+.1%} (sign target negative) [{elapsed:.0f} s]")


def check_8():
    rng = np.random.default_rng(20240601)
    zs = []
    for k in range(10):
        m = CONSTANTS.amu * 10 ** rng.uniform(0, 2.5)
        T = 10 ** rng.uniform(0, 3)
        res = bounds.mb_inverse_p2_check(m, T, n_samples=1_000_000, seed=1000 + k)
        zs.append(res.z)
    worst = max(abs(z) for z in zs)
    return worst < 3, f"<h m/p^2> vs h/(kB T), 10 random (m, T): max |z| = {worst:.2f}"


def check_9():
    temps = np.geomspace(30.0, 300.0, 8)
    m = REG["Ar"].mass
    var, fourth, dbound = [], [], []
    for k, T in enumerate(temps):
        V, K = sample_harmonic_potentials(T, 1_000_000, stiffness=1.0, seed=50 + k, kB=CONSTANTS.kB)
        ms = moment_stats_from_samples(V[:, None], K[:, None])
        var.append(ms.var_Vi)
        fourth.append(ms.fourth_Vi)
        dbound.append(bounds.diffusion_bound_moment(ms, m, T))
    s2 = np.polyfit(np.log(temps), np.log(var), 1)[0]
    s4 = np.polyfit(np.log(temps), np.log(fourth), 1)[0]
    spread = (max(dbound) - min(dbound)) / np.mean(dbound)
    ok = abs(s2 - 2) <= 0.05 and abs(s4 - 4) <= 0.05 and spread <= 0.02
    return ok, f"harmonic moments: slopes {s2:.3f} / {s4:.3f}, moment-bound spread {spread:.2%} over a decade of T"


def check_10():
    t0 = time.perf_counter()
    failures = []

    small = SimConfig(n_particles=108, interaction=LennardJones(cutoff=2.0), n_equil_steps=400,
                      n_prod_steps=2000, seed=11)
    a, b = run(small), run(small)
    if not np.array_equal(a.velocities, b.velocities):
        failures.append("determinism")

    comp = (a.velocities ** 2).mean(axis=1)
    comp = comp[: len(comp) // 10 * 10].reshape(10, -1, comp.shape[-1]).mean(axis=1)
    means, errs = comp.mean(0), comp.std(0, ddof=1) / math.sqrt(10)
    if any(abs(means[i] - means[j]) > 3 * math.hypot(errs[i], errs[j]) for i in range(3) for j in range(i + 1, 3)):
        failures.append("equipartition")

    nve = SimConfig(n_particles=256, interaction=LennardJones(cutoff=2.5), thermostat=NoThermostat(), seed=3)
    s = init_state(nve)
    equilibrate(s, dataclasses.replace(small, n_particles=256, interaction=nve.interaction, n_equil_steps=2000),
                np.random.default_rng(0))
    e0, drift = s.total_energy, 0.0
    for _ in range(100):
        step(s, nve, 1000)
        drift = max(drift, abs(s.total_energy - e0) / abs(e0))
    if drift >= 1e-3:
        failures.append(f"NVE drift {drift:.2e}")

    x = np.random.default_rng(1).normal(size=(2000, 30))
    if not np.allclose(autocorrelation(x, 200, "fft"), autocorrelation(x, 200, "direct"), rtol=1e-10, atol=1e-12):
        failures.append("fft/direct")

    rng = np.random.default_rng(2)
    for _ in range(200):
        m, T, c = 10 ** rng.uniform(-28, -24), 10 ** rng.uniform(-1, 4), 10 ** rng.uniform(-3, 3)
        pairs = [
            (bounds.diffusion_bound_chaos(c * m), bounds.diffusion_bound_chaos(m) / c),
            (bounds.kinematic_viscosity_bound(c * m), bounds.kinematic_viscosity_bound(m) / c),
            (bounds.lyapunov_bound(c * T), c * bounds.lyapunov_bound(T)),
            (bounds.viscosity_bound(c * T), c * bounds.viscosity_bound(T)),
        ]
        if any(not math.isclose(p, q, rel_tol=1e-12) for p, q in pairs):
            failures.append("homogeneity")
            break

    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 120
    detail = "determinism, equipartition, NVE drift, fft=direct, homogeneity"
    return ok, f"property suite ({detail}): NVE drift {drift:.1e} over 1e5 steps, " \
               f"{'all green' if not failures else 'failed: ' + ', '.join(failures)} [{elapsed:.0f} s]"


# ---------------------------------------------------------------------------

def test_criterion_01_bound_constants(emit):
    emit(1, *check_1())


def test_criterion_02_ser_closure(emit):
    emit(2, *check_2())


def test_criterion_03_viscosity_audit(emit, report):
    emit(3, *check_3(report))


def test_criterion_04_kinematic_audit(emit, report):
    emit(4, *check_4(report))


def test_criterion_05_synthetic_vacf(emit):
    emit(5, *check_5())


def test_criterion_06_lennard_jones_vacf(emit):
    emit(6, *check_6())


def test_criterion_07_magnetized_yukawa(emit):
    emit(7, *check_7())


def test_criterion_08_thermal_average(emit):
    emit(8, *check_8())


def test_criterion_09_moment_scaling(emit):
    emit(9, *check_9())


def test_criterion_10_property_suite(emit):
    emit(10, *check_10())


def main():
    rep = build_report(load_datasets(fixture_dir(), REG), REG)
    checks = [check_1, check_2, lambda: check_3(rep), lambda: check_4(rep), check_5,
              check_6, check_7, check_8, check_9, check_10]
    n_fail = 0
    for n, fn in enumerate(checks, 1):
        ok, detail = fn()
        n_fail += not ok
        print(_line(n, ok, detail), flush=True)
    return 1 if n_fail else 0


if __name__ == "__main__":
    sys.exit(main())
