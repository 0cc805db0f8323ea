import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uwbnlos import _kernels, _pykernels
from conftest import KERNEL_BACKENDS

mpmath.mp.dps = 40


def test_backend_is_reported():
    assert _kernels.BACKEND in ("compiled", "python")


@pytest.mark.parametrize(
    "x", [0.05, 0.1, 0.3, 0.5, 0.74, 0.75, 0.9, 1.0, 1.0 + 1e-9, 1.2, 1.25, 1.5, 1.75,
          1.999, 2.0, 2.2, 2.25, 3.0, 5.0, 7.99, 8.0, 33.3, 133.3, 400.0]
)
def test_log_gamma_matches_mpmath(kernels, x):
    ref = float(mpmath.loggamma(mpmath.mpf(x)))
    got = kernels.log_gamma(x)
    if ref == 0.0:
        assert got == 0.0
    else:
        assert abs(got - ref) <= 1e-12 * abs(ref)


def test_log_gamma_dense_sweep(kernels):
    xs = np.concatenate([np.linspace(0.05, 3.0, 600), np.geomspace(3.0, 400.0, 300)])
    worst = 0.0
    for x in xs:
        ref = float(mpmath.loggamma(mpmath.mpf(float(x))))
        if ref != 0.0:
            worst = max(worst, abs(kernels.log_gamma(float(x)) - ref) / abs(ref))
    assert worst < 1e-12


@pytest.mark.skipif(len(KERNEL_BACKENDS) < 2, reason="compiled kernels not built")
class TestBackendsAgree:
    py, c = KERNEL_BACKENDS[0], KERNEL_BACKENDS[-1]

    def test_log_gamma(self):
        for x in np.geomspace(0.05, 400, 997):
            a, b = self.py.log_gamma(float(x)), self.c.log_gamma(float(x))
            assert abs(a - b) <= 1e-15 * max(1.0, abs(a))

    def test_invert_kurtosis(self):
        for k in np.linspace(-1.1, 50, 101):
            a = self.py.invert_kurtosis(float(k), 0.15, 20.0, 1e-12, 200)
            b = self.c.invert_kurtosis(float(k), 0.15, 20.0, 1e-12, 200)
            assert a[0] == pytest.approx(b[0], abs=1e-11)

    def test_ggd_log_pdf(self):
        x = np.linspace(-30, 30, 1001).reshape(7, 143)
        for beta in (0.3, 1.0, 2.0, 7.5):
            a = self.py.ggd_log_pdf(x, 0.5, 1.7, beta)
            b = self.c.ggd_log_pdf(x, 0.5, 1.7, beta)
            assert a.shape == b.shape == x.shape
            np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-13)

    def test_rolling_variance(self):
        v = np.random.default_rng(3).normal(5, 2, 500)
        np.testing.assert_allclose(
            self.py.rolling_variance(v, 20), self.c.rolling_variance(v, 20), rtol=1e-12
        )

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(st.tuples(st.integers(-20, 20), st.booleans()), min_size=2, max_size=60)
    )
    def test_best_threshold(self, rows):
        s = np.array([r[0] for r in rows], dtype=float) / 4.0
        y = np.array([r[1] for r in rows])
        if not y.any():
            y[0] = True
        assert self.py.best_threshold(s, y) == self.c.best_threshold(s, y)


def test_variance_factor_matches_gamma_ratio(kernels):
    for beta in (0.5, 1.0, 2.0, 3.0):
        assert kernels.ggd_variance_factor(beta) == pytest.approx(
            math.gamma(3 / beta) / math.gamma(1 / beta), rel=1e-13
        )


def test_pure_python_fallback_selected_by_env(monkeypatch):
    import importlib

    import uwbnlos._kernels as k

    monkeypatch.setenv("UWBNLOS_PURE_PYTHON", "1")
    try:
        importlib.reload(k)
        assert k.BACKEND == "python"
        assert k.log_gamma is _pykernels.log_gamma
    finally:
        monkeypatch.delenv("UWBNLOS_PURE_PYTHON")
        importlib.reload(k)
