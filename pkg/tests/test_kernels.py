"""The numba and numpy kernel implementations must agree."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmhom import _kernels

pytestmark = pytest.mark.skipif(_kernels.numba_impl is None, reason="numba not installed")

NB, NP = _kernels.numba_impl, _kernels.numpy_impl


@given(n=st.integers(0, 12), xs=st.lists(st.floats(-5, 5), min_size=1, max_size=20))
@settings(max_examples=50, deadline=None)
def test_hermite_backends_agree(n, xs):
    x = np.array(xs)
    a, b = NB.hermite(n, x), NP.hermite(n, x)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12 * np.max(np.abs(b)))


@given(p=st.integers(0, 10), alpha=st.integers(0, 6), xs=st.lists(st.floats(0, 20), min_size=1, max_size=20))
@settings(max_examples=50, deadline=None)
def test_laguerre_backends_agree(p, alpha, xs):
    x = np.array(xs)
    a, b = NB.laguerre(p, alpha, x), NP.laguerre(p, alpha, x)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12 * max(np.max(np.abs(b)), 1.0))


def test_field_kernels_agree():
    rng = np.random.default_rng(3)
    x, y = rng.uniform(-2, 2, (2, 500))
    for args in [(2, 3, 0.7, 0.02, 0.4, 1.3), (0, 0, 0.5, 0.0, 0.0, 1.0)]:
        assert np.allclose(NB.hg_field(x, y, *args), NP.hg_field(x, y, *args), rtol=1e-12, atol=1e-14)
    for args in [(1, -3, 0.7, 0.02, 0.4, 1.3), (0, 2, 0.5, 0.0, 0.0, 1.0)]:
        assert np.allclose(NB.lg_field(x, y, *args), NP.lg_field(x, y, *args), rtol=1e-12, atol=1e-14)


def test_fourier_sum_agree():
    rng = np.random.default_rng(4)
    q = np.linspace(-5, 5, 16)
    v = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
    sx, sy = rng.uniform(-1, 1, (2, 40))
    assert np.allclose(NB.fourier_sum(v, q, q, sx, sy, 0.3), NP.fourier_sum(v, q, q, sx, sy, 0.3), atol=1e-11)


@given(seed=st.integers(0, 2**32 - 1), eff=st.floats(0, 1), dark=st.floats(0, 0.2), nr=st.booleans())
@settings(max_examples=30, deadline=None)
def test_detect_gates_bit_identical(seed, eff, dark, nr):
    rng = np.random.default_rng(seed)
    det = np.array([(a, b) for a in range(4) for b in range(a, 4)], dtype=np.int64)
    outcome = rng.integers(0, len(det), 300)
    u_eff, u_dark = rng.random((300, 2)), rng.random((300, 4))
    e, d = np.full(4, eff), np.full(4, dark)
    assert np.array_equal(NB.detect_gates(outcome, det, u_eff, u_dark, e, d, nr),
                          NP.detect_gates(outcome, det, u_eff, u_dark, e, d, nr))


def test_env_flag_selects_numpy(tmp_path):
    import subprocess
    import sys

    code = "from mmhom import _kernels; print(_kernels.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env={"MMHOM_DISABLE_NUMBA": "1", "PATH": ""},
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
