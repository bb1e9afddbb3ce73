import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lora_cs.channel import apply_awgn
from lora_cs.cs import block_diagonal, build_dictionary, build_measurement, compress
from lora_cs.phy import ChirpParams, fft_demodulate, make_chirp
from lora_cs.recovery import (complexify, demodulate_compressed, measurement_system, realify, refit_profile,
                              residual_profile, solve_l1)


def _y(sf, value, m, direction="up", snr=None, rng=None):
    x = make_chirp(ChirpParams(sf), value, direction)
    if snr is not None:
        x = apply_awgn(x, snr, rng)
    return compress(x, build_measurement(m=m))


def test_realify_real_input():
    rng = np.random.default_rng(0)
    theta = rng.standard_normal((6, 4))
    y = rng.standard_normal(6)
    sys = realify(y, theta)
    np.testing.assert_array_equal(sys.y_real, np.concatenate([y, np.zeros(6)]))
    np.testing.assert_array_equal(sys.theta_real[:6, :4], theta)


@given(seed=st.integers(0, 2**32), m=st.integers(1, 8), d=st.integers(1, 8))
@settings(max_examples=40, deadline=None)
def test_realify_round_trip(seed, m, d):
    rng = np.random.default_rng(seed)
    theta = rng.standard_normal((m, d)) + 1j * rng.standard_normal((m, d))
    y = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    sys = realify(y, theta)
    y2, t2 = complexify(sys)
    np.testing.assert_allclose(y2, y)
    np.testing.assert_allclose(t2, theta)
    assert np.linalg.norm(sys.y_real) == pytest.approx(np.linalg.norm(y))
    # the lift acts on stacked coefficients exactly like the complex product
    s = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    lifted = sys.theta_real @ np.concatenate([s.real, s.imag])
    np.testing.assert_allclose(lifted[:m] + 1j * lifted[m:], theta @ s, atol=1e-12)


def test_realify_shape_mismatch():
    with pytest.raises(ValueError):
        realify(np.zeros(3), np.zeros((4, 2)))


@pytest.mark.parametrize("solver", ["omp", "fista"])
def test_noiseless_exact_support(solver):
    y = _y(7, 42, 32)
    sys = measurement_system(7, 32).system.with_y(y.y)
    sol = solve_l1(sys, 1e-9, 4, solver)
    assert sol.support == (42,)
    assert sol.residual_norm < 1e-6


@pytest.mark.parametrize("solver", ["omp", "fista"])
def test_zero_input(solver):
    sys = measurement_system(7, 32).system.with_y(np.zeros(32, complex))
    sol = solve_l1(sys, 0.0, 4, solver)
    assert not np.any(sol.s_opt) and sol.residual_norm == 0.0


def test_solver_arguments():
    sys = measurement_system(7, 32).system
    with pytest.raises(ValueError):
        solve_l1(sys, -1.0)
    with pytest.raises(ValueError):
        solve_l1(sys, 0.0, 0)
    with pytest.raises(ValueError):
        solve_l1(sys, 0.0, 4, "lasso")


def test_omp_group_limit():
    rng = np.random.default_rng(3)
    y = _y(8, 5, 32, snr=-5, rng=rng)
    sys = measurement_system(8, 32).system.with_y(y.y)
    for k in (1, 2, 4):
        sol = solve_l1(sys, 0.0, k)
        assert len(sol.support) <= k
        assert np.count_nonzero(sol.s_opt) == len(sol.support)


def test_residual_profile_noiseless():
    p = ChirpParams(8)
    y = _y(8, 100, 16)
    phi = block_diagonal(build_measurement(m=16), 8)
    psi = build_dictionary(p).psi
    sys = realify(y, phi @ psi)
    sol = solve_l1(sys, 1e-9, 4)
    prof = residual_profile(y, phi, psi, sol.s_opt)
    assert prof.best == 100 and prof.r[100] < 1e-6
    # strict dominance of the true candidate
    others = np.delete(prof.r, 100)
    assert prof.r[100] < others.min()


def test_flat_profile_for_zero_solution():
    p = ChirpParams(7)
    y = _y(7, 3, 32)
    prof = residual_profile(y, build_measurement(m=32).phi, build_dictionary(p).psi, np.zeros(p.n, complex))
    np.testing.assert_allclose(prof.r, np.linalg.norm(y.y))


def test_refit_profile_is_lower_envelope():
    rng = np.random.default_rng(11)
    y = _y(8, 17, 16, snr=0, rng=rng)
    theta = measurement_system(8, 16).theta
    solver_prof = demodulate_compressed(y, try_down=False).profile
    refit = refit_profile(y, theta)
    assert np.all(refit.r <= solver_prof.r + 1e-9)
    assert refit.best == 17


def test_noisy_profile_peaks_at_truth():
    rng = np.random.default_rng(5)
    hits = 0
    for t in range(50):
        v = int(rng.integers(512))
        d = demodulate_compressed(_y(9, v, 8, snr=0, rng=rng))
        hits += int(np.argmax(1 - d.profile.r / np.linalg.norm(d.profile.r)) == v)
    assert hits >= 48


def test_demodulate_high_snr_and_down_fallback():
    d = demodulate_compressed(_y(8, 200, 8))
    assert (d.value, d.direction) == (200, "up")
    d = demodulate_compressed(_y(8, 0, 8, "down"))
    assert d.direction == "down" and d.value == 0
    d = demodulate_compressed(_y(8, 77, 8, "down"))
    assert d.direction == "down" and d.value == 77
    with pytest.raises(ValueError):
        demodulate_compressed(_y(8, 0, 8), ChirpParams(7))


def test_argmin_matches_fft_without_compression():
    p = ChirpParams(7)
    phi = build_measurement(m=128)
    for v in range(p.n):
        x = make_chirp(p, v)
        assert demodulate_compressed(compress(x, phi)).value == fft_demodulate(x, p)[0]


@pytest.mark.parametrize("c", [2.0, 1j, 0.1])
def test_decision_scale_invariance(c):
    rng = np.random.default_rng(8)
    for _ in range(30):
        v = int(rng.integers(256))
        y = _y(8, v, 8, snr=0, rng=rng)
        assert demodulate_compressed(y.scaled(c)).value == demodulate_compressed(y).value


def test_sf9_medium_snr_error_rate():
    rng = np.random.default_rng(9)
    errs = 0
    for _ in range(500):
        v = int(rng.integers(512))
        errs += demodulate_compressed(_y(9, v, 8, snr=0, rng=rng)).value != v
    assert errs / 500 <= 0.04
