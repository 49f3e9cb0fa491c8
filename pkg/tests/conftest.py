import pytest

from transport_bounds.mdsim import LennardJones, NoThermostat, SimConfig, VelocityRescale, Yukawa

AMU = 1.66053906660e-27
M_AR = 39.948 * AMU
M_HE = 4.002602 * AMU


@pytest.fixture
def small_lj():
    """108-particle LJ liquid with a short cutoff: fast enough for unit tests."""
    return SimConfig(
        n_particles=108,
        number_density=0.85,
        temperature=0.76,
        dt=0.005,
        n_equil_steps=400,
        n_prod_steps=400,
        sample_stride=2,
        interaction=LennardJones(cutoff=2.0),
        thermostat=VelocityRescale(interval=10),
        record_positions=True,
        skin=0.3,
        seed=3,
    )


@pytest.fixture
def small_yukawa():
    return SimConfig(
        n_particles=144,
        dimension=2,
        number_density=0.3183098861837907,
        temperature=1.0,
        dt=0.004,
        n_equil_steps=200,
        n_prod_steps=200,
        sample_stride=2,
        interaction=Yukawa(kappa=2.0, coupling=5.0, magnetic_field=1.0),
        thermostat=NoThermostat(),
        seed=1,
    )
