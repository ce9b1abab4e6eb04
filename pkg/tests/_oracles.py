"""Independent oracles used across the test suite.

Each oracle deliberately avoids the code path it checks: brute-force
index loops for tensor contractions, high-precision finite differences
for cumulants, a recursive counter for partitions.
"""

import math

import mpmath
import numpy as np


def brute_force_tensor_inner(a: np.ndarray, b: np.ndarray) -> float:
    """Explicit sum over all index tuples (no vectorization)."""
    assert a.shape == b.shape
    total = 0.0
    it = np.nditer(a, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        total += a[idx] * b[idx]
    return total


def brute_force_moment_entry(centers, weights, idx) -> float:
    """One entry of sum_j alpha_j theta_j^(x k) by direct products."""
    total = 0.0
    for c, w in zip(centers, weights):
        prod = w
        for i in idx:
            prod *= c[i]
        total += prod
    return total


def fd_cumulant(values, probs, m: int, step: float | None = None) -> float:
    """m-th cumulant of a discrete variable via central finite differences.

    Differentiates log E[exp(tX)] at t = 0 with mpmath at 60 digits, so
    the h^-m amplification of rounding is irrelevant; the O(h^2)
    truncation term is removed by one Richardson step (h and h/2).
    """
    if step is None:
        step = 1e-2 / m
    with mpmath.workdps(60):
        vals = [mpmath.mpf(float(v)) for v in values]
        ps = [mpmath.mpf(float(p)) for p in probs]

        def logm(t):
            return mpmath.log(mpmath.fsum(p * mpmath.exp(t * v) for v, p in zip(vals, ps)))

        def central(h):
            acc = mpmath.mpf(0)
            for i in range(m + 1):
                t = (mpmath.mpf(m) / 2 - i) * h
                acc += (-1) ** i * mpmath.binomial(m, i) * logm(t)
            return acc / h**m

        h = mpmath.mpf(step)
        return float((4 * central(h / 2) - central(h)) / 3)


def count_partitions(total: int) -> int:
    """Number of integer partitions, by the standard recursion."""

    def rec(remaining, cap):
        if remaining == 0:
            return 1
        return sum(rec(remaining - first, first) for first in range(min(remaining, cap), 0, -1))

    return rec(total, total)


def central_difference_gradient(f, x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Component-wise central differences of a scalar function."""
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e.flat[i] = h
        grad.flat[i] = (f(x + e) - f(x - e)) / (2 * h)
    return grad


def gaussian_mixture_logpdf(y, centers, weights, sigma):
    """Reference log-density via mpmath (stable, high precision)."""
    d = len(y)
    with mpmath.workdps(40):
        total = mpmath.fsum(
            mpmath.mpf(float(w))
            * mpmath.exp(-sum((float(a) - float(b)) ** 2 for a, b in zip(y, c)) / (2 * sigma**2))
            for c, w in zip(centers, weights)
        )
        return float(mpmath.log(total) - d * mpmath.log(2 * mpmath.pi * sigma**2) / 2)


def factorial(n: int) -> int:
    return math.factorial(n)
