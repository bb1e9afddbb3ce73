"""The compiled kernels and the numpy fallback must agree."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lora_cs import _fallback, kernels
from lora_cs.recovery import measurement_system

try:
    from lora_cs import _kernels
except ImportError:  # extension not built
    _kernels = None

needs_ext = pytest.mark.skipif(_kernels is None, reason="compiled extension not built")


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")


@needs_ext
@given(seed=st.integers(0, 2**64 - 1), m=st.sampled_from([1, 4, 16, 128]))
@settings(max_examples=30, deadline=None)
def test_bernoulli_parity(seed, m):
    np.testing.assert_array_equal(_kernels.bernoulli_signs(seed, m, 128), _fallback.bernoulli_signs(seed, m, 128))


@needs_ext
def test_splitmix_parity():
    c = np.arange(1000, dtype=np.uint64)
    np.testing.assert_array_equal(_kernels.splitmix64(99, c), _fallback.splitmix64(99, c))


@needs_ext
@given(seed=st.integers(0, 2**32), k=st.integers(1, 6), eps=st.sampled_from([0.0, 1.0, 5.0]))
@settings(max_examples=40, deadline=None)
def test_omp_parity(seed, k, eps):
    sys = measurement_system(8, 16).system
    rng = np.random.default_rng(seed)
    y = rng.standard_normal(sys.theta_real.shape[0])
    a = _kernels.omp(sys.theta_real, y, sys.norms, 2 * k, eps, sys.d, k)
    b = _fallback.omp(sys.theta_real, y, sys.norms, 2 * k, eps, sys.d, k)
    np.testing.assert_array_equal(np.asarray(a[0]), np.asarray(b[0]))
    np.testing.assert_allclose(a[1], b[1], atol=1e-9)
    np.testing.assert_allclose(a[2], b[2], atol=1e-9)


def test_fallback_omp_residual_is_least_squares():
    sys = measurement_system(7, 32).system
    rng = np.random.default_rng(1)
    y = rng.standard_normal(64)
    support, coef, history = _fallback.omp(sys.theta_real, y, sys.norms, 6, 0.0, sys.d, 3)
    A = sys.theta_real[:, support]
    ls, *_ = np.linalg.lstsq(A, y, rcond=None)
    np.testing.assert_allclose(coef, ls, atol=1e-9)
    assert history[-1] == pytest.approx(np.linalg.norm(y - A @ ls))
    assert np.all(np.diff(history) <= 1e-12)
