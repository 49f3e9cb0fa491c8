import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from transport_bounds.mdsim import Trajectory
from transport_bounds.vacf import (
    MaxLagError,
    Vacf,
    VACFEstimator,
    analyze,
    autocorrelation,
    d_plus,
    estimate_vacf,
    first_zero,
    green_kubo_D,
    max_slope,
    msd_curve,
    plateau_cutoff,
    read_vacf,
    triangle_bound,
    vacf_from_function,
    write_vacf,
)

# e^{-t} cos t: D = 1/2, D+ = int_0^{pi/2} = (1 + e^{-pi/2}) / 2, max|G'| = 1 at t=0
DAMPED_D_PLUS = 0.603939788175381
DAMPED_D = 0.5


def ou_trajectory(gamma=2.0, T=1.5, dt=0.01, n_samples=40000, n_particles=50, d=3, seed=0):
    """Ornstein-Uhlenbeck velocities: G(t) = T exp(-gamma t) exactly."""
    rng = np.random.default_rng(seed)
    a = math.exp(-gamma * dt)
    s = math.sqrt(T * (1 - a * a))
    v = np.empty((n_samples, n_particles, d))
    v[0] = rng.normal(0, math.sqrt(T), (n_particles, d))
    noise = rng.normal(0, s, (n_samples, n_particles, d))
    for k in range(1, n_samples):
        v[k] = a * v[k - 1] + noise[k]
    return Trajectory(times=np.arange(n_samples) * dt, velocities=v)


def test_fft_matches_direct():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(300, 7))
    np.testing.assert_allclose(autocorrelation(x, 50, "fft"), autocorrelation(x, 50, "direct"),
                               rtol=1e-10, atol=1e-12)


def test_cosine_signal():
    t = np.arange(4000) * 0.01
    x = np.cos(t)[:, None]
    nlag = 400
    c = autocorrelation(x, nlag)
    # exact finite-sum average of cos(t_i) cos(t_i + tau)
    ref = np.array([np.mean(np.cos(t[: len(t) - k]) * np.cos(t[k:])) for k in range(nlag + 1)])
    np.testing.assert_allclose(c, ref, rtol=1e-10, atol=1e-12)
    assert c[0] == pytest.approx(0.5, abs=0.01)


def test_white_noise_decorrelates():
    rng = np.random.default_rng(2)
    x = rng.normal(size=(20000, 20))
    c = autocorrelation(x, 10)
    assert c[0] == pytest.approx(1.0, abs=0.01)
    assert np.all(np.abs(c[1:]) < 5 / math.sqrt(x.size))


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(0.1, 10.0))
def test_integrals_linear_in_scale(a, b):
    base = vacf_from_function(lambda t: np.exp(-t) * np.cos(2 * t), 0.01, 10.0)
    other = vacf_from_function(lambda t: np.exp(-2 * t), 0.01, 10.0)
    combo = Vacf(base.lags, a * base.values + b * other.values)
    lhs = green_kubo_D(combo, 10.0).value
    rhs = a * green_kubo_D(base, 10.0).value + b * green_kubo_D(other, 10.0).value
    assert lhs == pytest.approx(rhs, rel=1e-12)
    assert d_plus(base.scaled(a)).value == pytest.approx(a * d_plus(base).value, rel=1e-12)
    assert triangle_bound(base.scaled(a)) == pytest.approx(a * triangle_bound(base), rel=1e-12)


def test_exponential_never_crosses():
    lam, g0 = 1.7, 2.0
    # the decade rule needs I(t) - I(t/10) < 0.5% I(t), i.e. t of order 30 here
    v = vacf_from_function(lambda t: g0 * np.exp(-lam * t), 0.005, 40.0)
    assert first_zero(v) == math.inf
    gk = green_kubo_D(v)
    assert gk.converged
    assert gk.value == pytest.approx(g0 / lam, rel=1e-3)
    # D+ over the whole window equals D for a positive VACF
    assert d_plus(v).value == pytest.approx(g0 / lam, rel=1e-4)
    assert triangle_bound(v) == pytest.approx(g0 / (2 * lam), rel=1e-2)


def test_damped_cosine_oracle():
    v = vacf_from_function(lambda t: np.exp(-t) * np.cos(t), 1e-3, 30.0)
    assert first_zero(v) == pytest.approx(math.pi / 2, abs=1e-6)
    assert d_plus(v).value == pytest.approx(DAMPED_D_PLUS, rel=1e-4)
    assert green_kubo_D(v).value == pytest.approx(DAMPED_D, rel=1e-3)
    assert max_slope(v) == pytest.approx(1.0, rel=1e-3)
    assert triangle_bound(v) == pytest.approx(0.5, rel=1e-3)
    assert triangle_bound(v) <= d_plus(v).value


def test_plateau_not_reached_is_flagged():
    v = vacf_from_function(lambda t: np.exp(-0.05 * t), 0.01, 5.0)
    cutoff, ok = plateau_cutoff(v)
    assert not ok
    assert cutoff == pytest.approx(5.0)


def test_explicit_cutoff_beyond_window():
    v = vacf_from_function(lambda t: np.exp(-t), 0.01, 5.0)
    with pytest.raises(MaxLagError):
        green_kubo_D(v, 6.0)


def test_max_lag_error_names_admissible():
    traj = ou_trajectory(n_samples=101, n_particles=2)
    with pytest.raises(MaxLagError) as exc:
        estimate_vacf(traj, 0.8)
    assert exc.value.admissible == pytest.approx(0.5)
    assert "0.5" in str(exc.value)


def test_ou_process_recovers_diffusion():
    gamma, T = 2.0, 1.5
    traj = ou_trajectory(gamma, T)
    vacf, est = analyze(traj, max_lag=5.0)
    assert vacf.g0 == pytest.approx(T, rel=0.02)
    assert est.D == pytest.approx(T / gamma, rel=0.05)
    assert abs(est.D - T / gamma) < 4 * est.D_err
    mid = int(0.5 / vacf.dt)
    assert vacf.values[mid] == pytest.approx(T * math.exp(-gamma * 0.5), rel=0.05)


def test_msd_curve_matches_brute_force():
    rng = np.random.default_rng(3)
    pos = np.cumsum(rng.normal(size=(200, 5, 3)), axis=0)
    nlag = 30
    ref = np.array([((pos[k:] - pos[: len(pos) - k]) ** 2).sum(-1).mean() / 3 for k in range(nlag + 1)])
    got = msd_curve(pos, nlag)
    scale = ref[1:] / got[1:]
    # accept either per-component or full-vector normalisation, but it must be exact
    assert np.allclose(scale, scale[0], rtol=1e-10)
    assert scale[0] in (pytest.approx(1.0), pytest.approx(1.0 / 3.0))


def test_msd_agrees_with_d_plus_for_ou_walk():
    # integrate OU velocities: the MSD slope at long times gives T / gamma
    gamma, T = 2.0, 1.5
    traj = ou_trajectory(gamma, T, n_samples=20000, n_particles=40)
    pos = np.cumsum(traj.velocities, axis=0) * traj.sample_interval
    traj = Trajectory(times=traj.times, velocities=traj.velocities, positions=pos)
    _, est = analyze(traj, max_lag=5.0)
    # the noisy estimate crosses zero in the tail, which enables the MSD check
    assert math.isfinite(est.t_v) and est.t_v > 1.0
    assert est.msd_D == pytest.approx(T / gamma, rel=0.1)
    assert est.msd_D == pytest.approx(est.D_plus, rel=0.05)


def test_estimator_api():
    est = VACFEstimator(max_lag=2.0, n_blocks=4)
    assert est.get_params()["max_lag"] == 2.0
    c = clone(est)
    assert c.get_params() == est.get_params()
    with pytest.raises(NotFittedError):
        est.transform()
    traj = ou_trajectory(n_samples=2000, n_particles=10)
    out = est.fit_transform(traj)
    assert out.shape == (201, 2)
    assert est.D_ > 0 and est.t_v_ > 1.0
    est2 = VACFEstimator(max_lag=2.0, n_blocks=4).fit(traj.velocities, sample_interval=traj.sample_interval)
    assert est2.D_ == est.D_
    with pytest.raises(ValueError):
        VACFEstimator().fit(traj.velocities)


def test_vacf_csv_round_trip(tmp_path):
    traj = ou_trajectory(n_samples=500, n_particles=5)
    v = estimate_vacf(traj, 1.0, n_blocks=4)
    back = read_vacf(write_vacf(v, tmp_path / "v.csv"))
    np.testing.assert_array_equal(back.values, v.values)
    np.testing.assert_array_equal(back.lags, v.lags)
    np.testing.assert_array_equal(back.stderr, v.stderr)


def test_vacf_rejects_bad_input():
    with pytest.raises(ValueError):
        Vacf(np.array([0.0, 1.0]), np.array([-1.0, 0.0]))
    with pytest.raises(ValueError):
        Vacf(np.array([1.0, 2.0]), np.array([1.0, 0.0]))


def test_plateau_matches_brute_force():
    rng = np.random.default_rng(5)
    for _ in range(20):
        g = np.exp(-rng.uniform(0.05, 2) * np.arange(400) * 0.05) * np.cos(rng.uniform(0, 3) * np.arange(400) * 0.05)
        v = Vacf(np.arange(400) * 0.05, g)
        from transport_bounds.vacf import running_integral
        I = running_integral(v)
        expect = (v.lags[-1], False)
        for j in range(10, 400):
            seg = I[j // 10: j + 1]
            if I[j] != 0 and seg.max() - seg.min() < 0.005 * abs(I[j]):
                expect = (v.lags[j], True)
                break
        assert plateau_cutoff(v) == expect
