import math

import pytest

from transport_bounds.units import (
    CONSTANT_SET_VERSION,
    CONSTANTS,
    Dimension,
    DimensionError,
    PhysicalConstants,
    Quantity,
    canonical_unit,
    convert,
    molecular_mass,
    planckian_time,
    thermal_de_broglie,
)

from conftest import AMU, M_AR


def test_exact_si_constants():
    assert CONSTANTS.h == 6.62607015e-34
    assert CONSTANTS.kB == 1.380649e-23
    assert CONSTANTS.NA == 6.02214076e23
    assert CONSTANTS.amu == AMU
    assert CONSTANTS.hbar == pytest.approx(CONSTANTS.h / (2 * math.pi), rel=1e-15)
    assert CONSTANT_SET_VERSION == "CODATA-2018"


def test_inconsistent_constant_set_rejected():
    with pytest.raises(ValueError):
        PhysicalConstants(hbar=1.0, h=1.0, kB=1.0, amu=1.0, NA=1.0)


def test_planckian_time_300K():
    assert planckian_time(300.0) == pytest.approx(2.54607752741924605e-14, rel=1e-12)


def test_planckian_time_scales_inversely():
    assert planckian_time(150.0) == pytest.approx(2 * planckian_time(300.0), rel=1e-14)


def test_thermal_wavelength_argon_300K():
    assert thermal_de_broglie(M_AR, 300.0) == pytest.approx(1.59474686553406705e-11, rel=1e-12)


def test_thermal_wavelength_scaling():
    lam = thermal_de_broglie(M_AR, 300.0)
    assert thermal_de_broglie(4 * M_AR, 300.0) == pytest.approx(lam / 2, rel=1e-14)
    assert thermal_de_broglie(M_AR, 1200.0) == pytest.approx(lam / 2, rel=1e-14)


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_domain_errors(bad):
    with pytest.raises(ValueError):
        planckian_time(bad)
    with pytest.raises(ValueError):
        thermal_de_broglie(bad, 300.0)
    with pytest.raises(ValueError):
        molecular_mass(bad)


def test_molecular_mass():
    assert molecular_mass(0.039948) == pytest.approx(M_AR, rel=1e-12)


def test_unit_conversions():
    assert convert(Quantity(290.2, "uPa*s"), "Pa*s").value == pytest.approx(290.2e-6)
    assert convert(Quantity(1.0, "atm"), "MPa").value == pytest.approx(0.101325)
    assert convert(Quantity(3.40, "A"), "m").value == pytest.approx(3.40e-10)
    assert convert(Quantity(1.0, "cP"), "mPa*s").value == pytest.approx(1.0)


def test_molar_density_needs_molar_mass():
    q = Quantity(35.0, "mol/l")
    with pytest.raises(ValueError):
        convert(q, "kg/m3")
    rho = convert(q, "kg/m3", molar_mass=0.039948).value
    assert rho == pytest.approx(35.0e3 * 0.039948)
    n = convert(Quantity(rho, "kg/m3"), "1/m3", molar_mass=0.039948).value
    assert n == pytest.approx(35.0e3 * CONSTANTS.NA)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        Quantity(1.0, "K") + Quantity(1.0, "s")
    with pytest.raises(DimensionError):
        convert(Quantity(1.0, "K"), "s")
    s = Quantity(1.0, "ps") + Quantity(1000.0, "fs")
    assert s.si == pytest.approx(2e-12)
    assert Quantity(1.0, "MPa").dimension is Dimension.PRESSURE


def test_unit_aliases():
    assert canonical_unit("mPa.s") == "mPa*s"
    assert canonical_unit("kg/m^3") == "kg/m3"
    with pytest.raises(KeyError):
        canonical_unit("furlong")
