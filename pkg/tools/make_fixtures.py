"""Regenerate the bundled fluid-property fixtures.

Each file mixes two kinds of rows, marked in the ``Source`` column:

* ``anchor``: a state point at a published property minimum. Where only a
  ratio was published, the missing density or viscosity is back-solved
  from it with the package constants.
* ``context``: smooth synthetic neighbours (Arrhenius or power-law
  viscosity, linear or near-ideal-gas density) that keep every anchor the
  grid minimum along its branch. They exercise the scans; they are not
  reference data.

Run from the repository root: ``python tools/make_fixtures.py``.
"""

import math
from pathlib import Path

from transport_bounds.thermo import default_registry
from transport_bounds.units import CONSTANTS

OUT = Path(__file__).resolve().parents[1] / "src/transport_bounds/thermo/data/fixtures"
REG = default_registry()
ATM = 0.101325  # MPa
R_GAS = CONSTANTS.kB * CONSTANTS.NA


def rho_from_eta_over_nh(fluid, eta, ratio):
    n = eta / (ratio * CONSTANTS.h)
    return n * REG[fluid].molar_mass / CONSTANTS.NA


def eta_from_ser(fluid, T, D):
    return CONSTANTS.kB * T / (6 * math.pi * D * REG[fluid].radius)


def arrhenius(T, T0, eta0, T1, eta1):
    """ln(eta) linear in 1/T through both anchors."""
    b = math.log(eta0 / eta1) / (1 / T0 - 1 / T1)
    return eta0 * math.exp(b * (1 / T - 1 / T0))


def lerp(x, x0, y0, x1, y1):
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


def gas_density(fluid, T, P_mpa, T0, rho0, P0_mpa):
    """Near-ideal gas whose compressibility deficit at (T0, P0) scales as P/T^2."""
    M = REG[fluid].molar_mass
    z0 = P0_mpa * 1e6 * M / (rho0 * R_GAS * T0)
    z = 1 - (1 - z0) * (P_mpa / P0_mpa) * (T0 / T) ** 2
    return P_mpa * 1e6 * M / (z * R_GAS * T)


def isobaric_saturation(fluid, t_low, eta_low, rho_low, t_sat, eta_liq, rho_liq,
                        eta_vap, rho_vap, liq_T, vap_T, vap_exp):
    rows = [(t_low, ATM, rho_low, eta_low, "liquid", "anchor")]
    for T in liq_T:
        rows.append((T, ATM, lerp(T, t_low, rho_low, t_sat, rho_liq),
                     arrhenius(T, t_low, eta_low, t_sat, eta_liq), "liquid", "context"))
    rows.append((t_sat, ATM, rho_liq, eta_liq, "liquid", "anchor"))
    rows.append((t_sat, ATM, rho_vap, eta_vap, "vapor", "anchor"))
    for T in vap_T:
        rows.append((T, ATM, gas_density(fluid, T, ATM, t_sat, rho_vap, ATM),
                     eta_vap * (T / t_sat) ** vap_exp, "vapor", "context"))
    return rows


def fixtures():
    files = {}

    # argon, one atmosphere
    eta_ar_liq = 260.3e-6
    files["Ar_isobaric_0.101325MPa.csv"] = ("Ar", "isobaric", isobaric_saturation(
        "Ar", 83.81, 290.2e-6, 1416.9, 87.3, eta_ar_liq, rho_from_eta_over_nh("Ar", eta_ar_liq, 18.67),
        7.169e-6, rho_from_eta_over_nh("Ar", 7.169e-6, 124.3),
        [84.5, 85.0, 85.5, 86.0, 86.5, 87.0], [90.0, 100.0, 120.0, 150.0, 200.0, 250.0, 300.0], 0.93))

    # helium, one atmosphere
    eta_he_low = eta_from_ser("He", 2.177, 3.248e-9)
    files["He_isobaric_0.101325MPa.csv"] = ("He", "isobaric", isobaric_saturation(
        "He", 2.177, eta_he_low, 146.2, 4.224, 3.155e-6, rho_from_eta_over_nh("He", 3.155e-6, 0.2539),
        1.246e-6, rho_from_eta_over_nh("He", 1.246e-6, 0.7397),
        [2.5, 3.0, 3.5, 4.0], [5.0, 6.0, 8.0, 10.0, 15.0, 20.0, 30.0], 0.65))

    # hydrogen, one atmosphere
    eta_h2_low = eta_from_ser("H2", 13.96, 2.747e-9)
    files["H2_isobaric_0.101325MPa.csv"] = ("H2", "isobaric", isobaric_saturation(
        "H2", 13.96, eta_h2_low, 77.0, 20.37, 13.49e-6, rho_from_eta_over_nh("H2", 13.49e-6, 0.9619),
        0.9963e-6, rho_from_eta_over_nh("H2", 0.9963e-6, 3.778),
        [14.5, 15.0, 16.0, 17.0, 18.0, 19.0, 20.0], [22.0, 25.0, 30.0, 40.0, 60.0, 100.0], 0.9))

    # nitrogen, isotherm at 63.15 K
    T = 63.15
    p_lo, p_sat = 0.001, 0.01252
    eta_lo = 4.365e-6
    rho_lo = rho_from_eta_over_nh("N2", eta_lo, 5740)
    eta_sat = eta_from_ser("N2", T, 5.807e-8)
    rho_sat = rho_from_eta_over_nh("N2", eta_sat, 455.6)
    z_lo = p_lo * 1e6 * REG["N2"].molar_mass / (rho_lo * R_GAS * T)
    z_sat = p_sat * 1e6 * REG["N2"].molar_mass / (rho_sat * R_GAS * T)
    rows = [(T, p_lo, rho_lo, eta_lo, "vapor", "anchor")]
    for P in (0.002, 0.004, 0.006, 0.008, 0.010):
        z = lerp(P, p_lo, z_lo, p_sat, z_sat)
        rows.append((T, P, P * 1e6 * REG["N2"].molar_mass / (z * R_GAS * T),
                     lerp(P, p_lo, eta_lo, p_sat, eta_sat), "vapor", "context"))
    rows.append((T, p_sat, rho_sat, eta_sat, "vapor", "anchor"))
    eta_liq = 311.6e-6
    rho_liq = rho_from_eta_over_nh("N2", eta_liq, 25.22)
    rows.append((T, p_sat, rho_liq, eta_liq, "liquid", "anchor"))
    for P in (0.1, 0.5, 1.0, 2.0, 5.0, 10.0):
        rows.append((T, P, rho_liq * (1 + 2.0e-3 * (P - p_sat)),
                     eta_liq * math.exp(8.0e-3 * (P - p_sat)), "liquid", "context"))
    files["N2_isothermal_63.15K.csv"] = ("N2", "isothermal", rows)

    # kinematic-viscosity minima at fixed high pressure (supercritical)
    def nu_isobar(fluid, P, t_min, nu_min, temps, rho_of_T):
        out = []
        for T in temps:
            nu = nu_min * (1 + 2.0 * math.log(T / t_min) ** 2)
            rho = rho_of_T(T)
            out.append((T, P, rho, nu * rho, "supercritical", "anchor" if T == t_min else "context"))
        return out

    files["Ar_isobaric_100MPa.csv"] = ("Ar", "isobaric", nu_isobar(
        "Ar", 100.0, 347.6, 7.676e-8, [250.0, 300.0, 330.0, 347.6, 370.0, 400.0, 500.0],
        lambda T: 1230.0 - 1.2 * (T - 250.0)))
    files["H2_isobaric_50MPa.csv"] = ("H2", "isobaric", nu_isobar(
        "H2", 50.0, 98.71, 1.613e-7, [60.0, 75.0, 90.0, 98.71, 110.0, 130.0, 160.0],
        lambda T: 75.0 * (60.0 / T) ** 0.35))
    return files


def write(name, fluid, mode, rows, density_unit="kg/m3", visc_unit="uPa*s"):
    scale_rho = {"kg/m3": 1.0, "mol/l": 1.0 / (REG[fluid].molar_mass * 1e3)}[density_unit]
    scale_eta = {"uPa*s": 1e6, "Pa*s": 1.0}[visc_unit]
    lines = [
        f"# fluid: {fluid}",
        f"# mode: {mode}",
        "# Source=anchor: state point at a published property minimum (missing density or",
        "#   viscosity back-solved from the published ratio). Source=context: smooth synthetic",
        "#   neighbours for exercising scans; not reference data.",
        f"Temperature (K),Pressure (MPa),Density ({density_unit}),Viscosity ({visc_unit}),Phase,Source",
    ]
    for T, P, rho, eta, phase, src in rows:
        lines.append(f"{T:.10g},{P:.10g},{rho * scale_rho:.10g},{eta * scale_eta:.10g},{phase},{src}")
    (OUT / name).write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    for name, (fluid, mode, rows) in fixtures().items():
        # exercise the molar-density path on one file, as NIST exports use mol/l
        write(name, fluid, mode, rows, density_unit="mol/l" if fluid == "He" else "kg/m3")
        print(name, len(rows))
