"""Hot numeric kernels: mixture log-density panels and EM weight moments.

Everything downstream (population likelihood, gradients, EM steps, weight
expectations) reduces to sweeping a panel of evaluation points against the
mixture components.  These sweeps dominate runtime, so they are compiled
with numba when available.  Setting the environment variable
``LOWSNR_NUMBA=0`` selects the pure-numpy fallback instead; both paths are
parity-tested and benchmarked (see benchmarks/bench_kernels.py).

Kernel contracts (all float64, C-contiguous):

``logdens(points, centers, log_weights, sigma) -> (N,)``
    per-point ``log sum_j alpha_j exp(-||y_i - c_j||^2 / (2 sigma^2))``,
    evaluated stably by subtracting the max exponent.  The Gaussian
    normalization constant is NOT included.

``weight_moments(points, omega, centers, log_weights, sigma) -> (Ew, EwY)``
    posterior-weight moments ``Ew[j] = sum_i omega_i w_ij`` and
    ``EwY[j] = sum_i omega_i w_ij y_i`` where
    ``w_ij = exp(-||y_i-c_j||^2/(2 s^2)) / sum_l alpha_l exp(-||y_i-c_l||^2/(2 s^2))``
    (numerator carries no alpha; ``sum_j alpha_j w_ij = 1`` pointwise).
"""

import os

import numpy as np

__all__ = ["logdens", "weight_moments", "backend_name", "get_backend"]

_DISABLED = os.environ.get("LOWSNR_NUMBA", "1").lower() in ("0", "false", "off")

# Chunk rows so the numpy path never materializes more than ~32M floats.
_NP_CHUNK = 1 << 18


def _logdens_np(points, centers, log_weights, sigma):
    n = points.shape[0]
    out = np.empty(n)
    inv = 1.0 / (2.0 * sigma * sigma)
    for lo in range(0, n, _NP_CHUNK):
        hi = min(lo + _NP_CHUNK, n)
        diff = points[lo:hi, None, :] - centers[None, :, :]
        expo = log_weights[None, :] - inv * np.einsum("nkd,nkd->nk", diff, diff)
        m = expo.max(axis=1)
        out[lo:hi] = m + np.log(np.exp(expo - m[:, None]).sum(axis=1))
    return out


def _weight_moments_np(points, omega, centers, log_weights, sigma):
    n, d = points.shape
    k = centers.shape[0]
    ew = np.zeros(k)
    ewy = np.zeros((k, d))
    inv = 1.0 / (2.0 * sigma * sigma)
    for lo in range(0, n, _NP_CHUNK):
        hi = min(lo + _NP_CHUNK, n)
        diff = points[lo:hi, None, :] - centers[None, :, :]
        expo = -inv * np.einsum("nkd,nkd->nk", diff, diff)
        mixed = expo + log_weights[None, :]
        m = mixed.max(axis=1)
        denom = m + np.log(np.exp(mixed - m[:, None]).sum(axis=1))
        w = np.exp(expo - denom[:, None])  # (n, k)
        ow = omega[lo:hi, None] * w
        ew += ow.sum(axis=0)
        ewy += ow.T @ points[lo:hi]
    return ew, ewy


def _logdens_loops(points, centers, log_weights, sigma):
    n, d = points.shape
    k = centers.shape[0]
    out = np.empty(n)
    expo = np.empty(k)
    inv = 1.0 / (2.0 * sigma * sigma)
    for i in range(n):
        m = -np.inf
        for j in range(k):
            s = 0.0
            for a in range(d):
                t = points[i, a] - centers[j, a]
                s += t * t
            e = log_weights[j] - s * inv
            expo[j] = e
            if e > m:
                m = e
        acc = 0.0
        for j in range(k):
            acc += np.exp(expo[j] - m)
        out[i] = m + np.log(acc)
    return out


def _weight_moments_loops(points, omega, centers, log_weights, sigma):
    n, d = points.shape
    k = centers.shape[0]
    ew = np.zeros(k)
    ewy = np.zeros((k, d))
    expo = np.empty(k)
    inv = 1.0 / (2.0 * sigma * sigma)
    for i in range(n):
        m = -np.inf
        for j in range(k):
            s = 0.0
            for a in range(d):
                t = points[i, a] - centers[j, a]
                s += t * t
            e = -s * inv
            expo[j] = e
            if e + log_weights[j] > m:
                m = e + log_weights[j]
        acc = 0.0
        for j in range(k):
            acc += np.exp(expo[j] + log_weights[j] - m)
        denom = m + np.log(acc)
        for j in range(k):
            w = omega[i] * np.exp(expo[j] - denom)
            ew[j] += w
            for a in range(d):
                ewy[j, a] += w * points[i, a]
    return ew, ewy


_BACKENDS = {"numpy": (_logdens_np, _weight_moments_np)}

if not _DISABLED:
    try:
        from numba import njit

        # nogil so the CLI's sigma-grid threads can overlap kernel sweeps
        _BACKENDS["numba"] = (
            njit(cache=True, nogil=True)(_logdens_loops),
            njit(cache=True, nogil=True)(_weight_moments_loops),
        )
    except ImportError:  # pragma: no cover - numba is a hard dep, but be safe
        pass

_ACTIVE = "numba" if "numba" in _BACKENDS else "numpy"
logdens, weight_moments = _BACKENDS[_ACTIVE]


def backend_name() -> str:
    """Name of the kernel backend selected at import time."""
    return _ACTIVE


def get_backend(name: str):
    """Return the ``(logdens, weight_moments)`` pair for a named backend.

    The pure-python loop variants are exposed under ``"loops"`` so the
    benchmark can measure what numba buys over both numpy and bare loops.
    """
    if name == "loops":
        return _logdens_loops, _weight_moments_loops
    return _BACKENDS[name]
