import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transport_bounds import bounds
from transport_bounds.mdsim import MomentStats, moment_stats_from_samples, sample_harmonic_potentials
from transport_bounds.units import CONSTANTS, planckian_time

from conftest import M_AR, M_HE

HBAR, KB, H = CONSTANTS.hbar, CONSTANTS.kB, CONSTANTS.h

pos = st.floats(min_value=1e-3, max_value=1e3)
masses = st.floats(min_value=1e-27, max_value=1e-24)
temps = st.floats(min_value=0.1, max_value=1e4)


def _moments(var, fourth):
    return MomentStats(mean_Vi=0.0, var_Vi=var, fourth_Vi=fourth, mean_Ki=1.0,
                       sigma_Vi=math.sqrt(var), n_samples=1000)


# oracle values below come from a 30-digit evaluation with the CODATA-2018 numbers

def test_chaos_bound_argon():
    assert bounds.diffusion_bound_chaos(M_AR) == pytest.approx(2.53018428527804214e-10, rel=1e-12)


def test_chaos_bound_helium():
    assert bounds.diffusion_bound_chaos(M_HE) == pytest.approx(2.52525236904111943e-9, rel=1e-12)


def test_chaos_bound_argon_ratio():
    assert 1.244e-9 / bounds.diffusion_bound_chaos(M_AR) == pytest.approx(4.916, rel=1e-3)


def test_chaos_alt_constant():
    m = M_AR
    assert bounds.diffusion_bound_chaos_alt(m, 3) / bounds.diffusion_bound_chaos(m) == pytest.approx(
        math.pi / math.sqrt(3), rel=1e-14)


def test_kinematic_bound_argon():
    assert bounds.kinematic_viscosity_bound(M_AR) == pytest.approx(9.98876718301891918e-9, rel=1e-12)


def test_lyapunov_300K():
    assert bounds.lyapunov_bound(300.0) == pytest.approx(2.46779025364099809e14, rel=1e-12)
    assert bounds.lyapunov_bound(300.0) * planckian_time(300.0) == pytest.approx(2 * math.pi, rel=1e-14)


def test_t_min():
    assert bounds.t_min_bound(HBAR / 2) == pytest.approx(1.0, rel=1e-14)
    assert bounds.t_min_bound(KB * 300.0) == pytest.approx(1.27303876370962302e-14, rel=1e-12)


def test_viscosity_bound_liquid_argon():
    eta_b = bounds.viscosity_bound(2.1035e28)
    assert eta_b == pytest.approx(1.3937938560525e-5, rel=1e-12)
    assert 260.3e-6 / eta_b == pytest.approx(18.67, rel=1e-3)


def test_collision_time_viscosity():
    n, T = 2.45e25, 300.0
    assert bounds.collision_time_viscosity(n, T, H / (KB * T)) == pytest.approx(
        bounds.viscosity_bound(n), rel=1e-14)
    assert bounds.collision_time_viscosity(n, T, 1.3e-10) == pytest.approx(1.3192101195e-5, rel=1e-10)


def test_disorder_bound_alpha():
    m = M_AR
    assert bounds.disorder_d_plus_bound(1.0, 1.0, m, 3) == pytest.approx(HBAR / (24 * m), rel=1e-14)
    assert bounds.disorder_d_plus_bound(1.0, 2.0, m, 3) == pytest.approx(HBAR / (48 * m), rel=1e-14)


def test_generic_bound_null_observable():
    assert bounds.transport_bound_generic(0.0, 300.0) == 0.0


@pytest.mark.parametrize(
    "fn,args",
    [
        (bounds.diffusion_bound_chaos, (0.0,)),
        (bounds.lyapunov_bound, (-1.0,)),
        (bounds.viscosity_bound, (0.0,)),
        (bounds.kinematic_viscosity_bound, (-2.0,)),
        (bounds.t_min_bound, (0.0,)),
        (bounds.collision_time_viscosity, (1.0, 1.0, 0.0)),
        (bounds.transport_bound_generic, (1.0, 0.0)),
        (bounds.disorder_d_plus_bound, (1.0, 1.0, 1.0, 4)),
    ],
)
def test_domain_errors(fn, args):
    with pytest.raises(ValueError):
        fn(*args)


def test_moment_bound_zero_variance():
    with pytest.raises(ValueError):
        bounds.diffusion_bound_moment(_moments(0.0, 0.0), M_AR, 100.0)


def test_moment_bound_gaussian_case():
    s = 2.0e-21
    m, T = M_AR, 90.0
    got = bounds.diffusion_bound_moment(_moments(s**2, 3 * s**4), m, T)
    assert got == pytest.approx(HBAR * KB * T / (4 * math.sqrt(3) * m * s), rel=1e-12)


def test_moment_bound_branch_crossover():
    var = 1.0e-42
    at = _moments(var, 3 * var**2)
    b1, b2 = bounds.moment_bound_branches(at, M_AR, 100.0)
    assert b1 == pytest.approx(b2, rel=1e-12)
    lo = _moments(var, 2 * var**2)
    hi = _moments(var, 5 * var**2)
    for mom in (lo, hi):
        a, b = bounds.moment_bound_branches(mom, M_AR, 100.0)
        assert bounds.diffusion_bound_moment(mom, M_AR, 100.0) == max(a, b)
    a, b = bounds.moment_bound_branches(hi, M_AR, 100.0)
    assert a > b
    a, b = bounds.moment_bound_branches(lo, M_AR, 100.0)
    assert b > a


def test_moment_bound_harmonic_is_temperature_independent():
    vals = []
    for T in (10.0, 100.0):
        kT = KB * T
        vals.append(bounds.diffusion_bound_moment(_moments(kT**2 / 2, 3.75 * kT**4), M_AR, T))
    assert vals[0] == pytest.approx(vals[1], rel=1e-12)


def test_moment_bound_sampled_harmonic():
    V, _ = sample_harmonic_potentials(1.0, 200_000, seed=4)
    mom = moment_stats_from_samples(V)
    assert mom.var_Vi == pytest.approx(0.5, rel=0.02)
    assert mom.fourth_Vi == pytest.approx(3.75, rel=0.05)


@settings(max_examples=40, deadline=None)
@given(m=masses, T=temps)
def test_reduction_identity(m, T):
    generic = bounds.transport_bound_generic(KB * T / m, T)
    assert generic == pytest.approx(bounds.diffusion_bound_chaos(m), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(m=masses, T=temps)
def test_chaos_times_lyapunov_is_thermal_velocity(m, T):
    assert bounds.diffusion_bound_chaos(m) * bounds.lyapunov_bound(T) == pytest.approx(KB * T / m, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(m=masses, T=temps, c=pos)
def test_homogeneity(m, T, c):
    r = 1e-12
    assert bounds.diffusion_bound_chaos(c * m) == pytest.approx(bounds.diffusion_bound_chaos(m) / c, rel=r)
    assert bounds.kinematic_viscosity_bound(c * m) == pytest.approx(bounds.kinematic_viscosity_bound(m) / c, rel=r)
    assert bounds.lyapunov_bound(c * T) == pytest.approx(c * bounds.lyapunov_bound(T), rel=r)
    assert bounds.viscosity_bound(c * 1e28) == pytest.approx(c * bounds.viscosity_bound(1e28), rel=r)
    assert bounds.t_min_bound(c * 1e-21) == pytest.approx(bounds.t_min_bound(1e-21) / c, rel=r)
    assert bounds.transport_bound_generic(c * 5.0, T) == pytest.approx(
        c * bounds.transport_bound_generic(5.0, T), rel=r)
    assert bounds.collision_time_viscosity(1e28, T, c * 1e-12) == pytest.approx(
        c * bounds.collision_time_viscosity(1e28, T, 1e-12), rel=r)
    assert bounds.disorder_d_plus_bound(1e-21, c * 1e-21, m, 3) == pytest.approx(
        bounds.disorder_d_plus_bound(1e-21, 1e-21, m, 3) / c, rel=r)


@settings(max_examples=40, deadline=None)
@given(c=pos, kurt=st.floats(min_value=1.0, max_value=20.0))
def test_moment_bound_scales_inversely_with_energy(c, kurt):
    var = 1e-42
    base = bounds.diffusion_bound_moment(_moments(var, kurt * var**2), M_AR, 50.0)
    scaled = bounds.diffusion_bound_moment(_moments(c**2 * var, kurt * (c**2 * var) ** 2), M_AR, 50.0)
    assert scaled == pytest.approx(base / c, rel=1e-10)


def test_mb_check_matches_expectation():
    res = bounds.mb_inverse_p2_check(M_AR, 300.0, n_samples=1_000_000, seed=1)
    assert res.expected == pytest.approx(H / (KB * 300.0), rel=1e-14)
    assert abs(res.z) < 3


def test_mb_check_mass_independent_and_inverse_temperature():
    a = bounds.mb_inverse_p2_check(M_AR, 300.0, n_samples=200_000, seed=2)
    b = bounds.mb_inverse_p2_check(M_HE, 300.0, n_samples=200_000, seed=3)
    assert abs(a.estimate - b.estimate) < 3 * math.hypot(a.stderr, b.stderr)
    c = bounds.mb_inverse_p2_check(M_AR, 600.0, n_samples=200_000, seed=4)
    assert abs(2 * c.estimate - a.estimate) < 3 * math.hypot(2 * c.stderr, a.stderr)


def test_mb_check_stderr_scaling():
    a = bounds.mb_inverse_p2_check(M_AR, 300.0, n_samples=100_000, seed=5)
    b = bounds.mb_inverse_p2_check(M_AR, 300.0, n_samples=400_000, seed=6)
    assert b.stderr / a.stderr == pytest.approx(0.5, rel=0.2)


def test_mb_check_naive_estimator_still_unbiased():
    res = bounds.mb_inverse_p2_check(M_AR, 300.0, n_samples=1_000_000, seed=7, method="naive")
    assert res.method == "naive"
    assert abs(res.estimate / res.expected - 1) < 0.05


def test_mb_check_requires_samples():
    with pytest.raises(ValueError):
        bounds.mb_inverse_p2_check(M_AR, 300.0, n_samples=100)


def test_mb_check_deterministic():
    a = bounds.mb_inverse_p2_check(M_AR, 300.0, n_samples=50_000, seed=11)
    b = bounds.mb_inverse_p2_check(M_AR, 300.0, n_samples=50_000, seed=11)
    assert a == b


def test_verdict_three_valued():
    assert bounds.verdict(2.0, 1.0, 0.1) == "satisfied"
    assert bounds.verdict(0.5, 1.0, 0.1) == "violated"
    assert bounds.verdict(1.05, 1.0, 0.1) == "within-error"


def test_evaluate_bounds_partial():
    b = bounds.evaluate_bounds(T=300.0)
    assert set(b.evaluated()) == {"tau_planck", "lyapunov_max"}
    assert "d_bound_chaos" in b.omitted
    full = bounds.evaluate_bounds(m=M_AR, T=300.0, n=2e28, d=3, sigma=KB * 300.0,
                                  moments=_moments((KB * 300) ** 2, 3 * (KB * 300) ** 4))
    assert all(v > 0 for v in full.evaluated().values())
    assert full.d_bound_chaos * full.lyapunov_max == pytest.approx(KB * 300.0 / M_AR, rel=1e-12)
