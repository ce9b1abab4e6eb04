import os
import subprocess
import sys

import numpy as np
import pytest

from lowsnr import _kernels


def random_panel(rng, n=500, k=4, d=3):
    points = rng.normal(size=(n, d)) * 3.0
    omega = rng.uniform(0.1, 1.0, size=n)
    omega /= omega.sum()
    centers = rng.normal(size=(k, d))
    w = rng.uniform(0.2, 1.0, size=k)
    w /= w.sum()
    return points, omega, centers, np.log(w), 2.5


class TestParity:
    """numpy and numba backends must agree to float64 noise."""

    @pytest.mark.skipif("numba" not in _kernels._BACKENDS, reason="numba backend disabled")
    def test_logdens_matches(self, rng):
        points, _, centers, logw, sigma = random_panel(rng)
        f_np, _ = _kernels.get_backend("numpy")
        f_nb, _ = _kernels.get_backend("numba")
        a = f_np(points, centers, logw, sigma)
        b = f_nb(points, centers, logw, sigma)
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)

    @pytest.mark.skipif("numba" not in _kernels._BACKENDS, reason="numba backend disabled")
    def test_weight_moments_match(self, rng):
        points, omega, centers, logw, sigma = random_panel(rng)
        _, g_np = _kernels.get_backend("numpy")
        _, g_nb = _kernels.get_backend("numba")
        ew_a, ewy_a = g_np(points, omega, centers, logw, sigma)
        ew_b, ewy_b = g_nb(points, omega, centers, logw, sigma)
        np.testing.assert_allclose(ew_a, ew_b, rtol=1e-12)
        np.testing.assert_allclose(ewy_a, ewy_b, rtol=1e-12, atol=1e-14)

    def test_loops_reference_matches_numpy(self, rng):
        # the plain-python loop reference validates both production paths
        points, omega, centers, logw, sigma = random_panel(rng, n=60)
        f_np, g_np = _kernels.get_backend("numpy")
        f_ref, g_ref = _kernels.get_backend("loops")
        np.testing.assert_allclose(
            f_np(points, centers, logw, sigma), f_ref(points, centers, logw, sigma), rtol=1e-12
        )
        ew_a, ewy_a = g_np(points, omega, centers, logw, sigma)
        ew_b, ewy_b = g_ref(points, omega, centers, logw, sigma)
        np.testing.assert_allclose(ew_a, ew_b, rtol=1e-12)
        np.testing.assert_allclose(ewy_a, ewy_b, rtol=1e-12, atol=1e-14)


class TestStability:
    def test_logdens_handles_extreme_exponents(self):
        points = np.array([[1000.0], [0.0]])
        centers = np.array([[0.0], [1000.0]])
        logw = np.log(np.array([0.5, 0.5]))
        out = _kernels.logdens(points, centers, logw, 1.0)
        assert np.all(np.isfinite(out))

    def test_responsibilities_sum_to_one_pointwise(self, rng):
        # sum_chi alpha_chi w(y, chi) = 1 for every y
        points, omega, centers, logw, sigma = random_panel(rng, n=10000, k=5, d=2)
        ew, _ = _kernels.weight_moments(points, omega, centers, logw, sigma)
        assert float(np.exp(logw) @ ew) == pytest.approx(omega.sum(), abs=1e-12)
        # direct per-point check on a small slice
        for y in points[:200]:
            e = -((y - centers) ** 2).sum(axis=1) / (2 * sigma**2)
            w = np.exp(e) / (np.exp(logw) @ np.exp(e))
            assert float(np.exp(logw) @ w) == pytest.approx(1.0, abs=1e-12)


class TestEnvFlag:
    def test_backend_reports_name(self):
        assert _kernels.backend_name() in ("numba", "numpy")

    def test_disable_flag_selects_numpy(self):
        code = "from lowsnr import _kernels; print(_kernels.backend_name())"
        env = dict(os.environ, LOWSNR_NUMBA="0")
        out = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
        )
        assert out.stdout.strip() == "numpy"
