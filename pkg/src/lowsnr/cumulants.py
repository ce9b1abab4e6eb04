"""Moment-cumulant polynomials kappa_m = sum_lambda c_lambda prod mu_k.

The universal coefficients are computed by truncated formal power-series
arithmetic: expand

    log(1 + sum_k mu_k t^k / k!) = sum_j (-1)^(j-1) u^j / j

with symbolic monomials in the mu's, truncate at t^max_order, and read off
m! times the t^m coefficient.  Everything is exact rational arithmetic
(fractions.Fraction); the resulting c_lambda are integers.

Partitions are canonicalized as descending multisets.  A convention that
sums over ordered lists instead would split each c_lambda across
orderings; the defining property is the polynomial identity for kappa_m,
which is what the tests pin down (against high-precision finite
differences of log E[exp(tX)]).
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exceptions import ResourceLimitError

__all__ = [
    "Partition",
    "CumulantTable",
    "cumulant_coefficients",
    "cumulant_from_moments",
    "partitions_with_max_part",
]

MAX_ORDER_GUARD = 20


@dataclass(frozen=True)
class Partition:
    """A multiset of positive integers, stored sorted descending."""

    parts: tuple[int, ...]

    def __post_init__(self):
        if not self.parts:
            raise ValueError("partition must be nonempty")
        if any(p < 1 for p in self.parts):
            raise ValueError("partition parts must be positive")
        object.__setattr__(self, "parts", tuple(sorted(self.parts, reverse=True)))

    @property
    def total(self) -> int:
        return sum(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __str__(self):
        return "[" + ",".join(str(p) for p in self.parts) + "]"


@dataclass(frozen=True)
class CumulantTable:
    """Coefficients c_lambda for kappa_m, all orders m <= max_order."""

    max_order: int
    coeffs: dict[int, dict[Partition, Fraction]]

    def coefficient(self, parts: Iterable[int]) -> Fraction:
        lam = Partition(tuple(parts))
        return self.coeffs[lam.total].get(lam, Fraction(0))


# -- truncated power series in t with polynomial-in-mu coefficients --------
# a "poly" maps descending part-tuples to Fraction coefficients; a "series"
# is a list of polys indexed by the power of t, truncated at max_order.


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict[tuple[int, ...], Fraction] = {}
    for pa, ca in a.items():
        for pb, cb in b.items():
            key = tuple(sorted(pa + pb, reverse=True))
            out[key] = out.get(key, Fraction(0)) + ca * cb
    return out


def _series_mul(a: list, b: list, n: int) -> list:
    out = [dict() for _ in range(n + 1)]
    for i, ai in enumerate(a):
        if not ai:
            continue
        for j, bj in enumerate(b):
            if i + j > n or not bj:
                continue
            target = out[i + j]
            for key, c in _poly_mul(ai, bj).items():
                target[key] = target.get(key, Fraction(0)) + c
    return out


def cumulant_coefficients(max_order: int) -> CumulantTable:
    """Build the coefficient table for all orders up to ``max_order``."""
    if max_order < 1:
        raise ValueError(f"max_order must be >= 1, got {max_order}")
    if max_order > MAX_ORDER_GUARD:
        raise ResourceLimitError(
            f"max_order {max_order} exceeds guard {MAX_ORDER_GUARD} (factorial growth)"
        )
    n = max_order
    # u = sum_k mu_k t^k / k!
    u = [dict() for _ in range(n + 1)]
    for k in range(1, n + 1):
        u[k] = {(k,): Fraction(1, math.factorial(k))}
    # log(1+u) = sum_j (-1)^(j-1) u^j / j, truncated at t^n
    log_series = [dict() for _ in range(n + 1)]
    power = u
    for j in range(1, n + 1):
        if j > 1:
            power = _series_mul(power, u, n)
        sign = Fraction((-1) ** (j - 1), j)
        for p, poly in enumerate(power):
            target = log_series[p]
            for key, c in poly.items():
                target[key] = target.get(key, Fraction(0)) + sign * c
    coeffs: dict[int, dict[Partition, Fraction]] = {}
    for m in range(1, n + 1):
        fact = Fraction(math.factorial(m))
        coeffs[m] = {
            Partition(key): c * fact for key, c in log_series[m].items() if c != 0
        }
    return CumulantTable(max_order, coeffs)


def cumulant_from_moments(
    moments: Sequence[float], m: int, table: CumulantTable | None = None
) -> float:
    """Evaluate kappa_m from raw moments mu_1..mu_m."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if m > len(moments):
        raise ValueError(f"kappa_{m} needs {m} moments, got {len(moments)}")
    if table is None:
        table = cumulant_coefficients(m)
    if m > table.max_order:
        raise ValueError(f"table only covers orders <= {table.max_order}")
    total = 0.0
    for lam, c in table.coeffs[m].items():
        prod = 1.0
        for k in lam:
            prod *= moments[k - 1]
        total += float(c) * prod
    return total


def partitions_with_max_part(
    total: int, max_part: int, require_max: bool = False
) -> list[Partition]:
    """Partitions of ``total`` with largest part <= (or ==) ``max_part``."""
    if total < 1:
        raise ValueError(f"total must be >= 1, got {total}")
    if max_part < 1:
        raise ValueError(f"max_part must be >= 1, got {max_part}")

    def rec(remaining: int, cap: int) -> list[tuple[int, ...]]:
        if remaining == 0:
            return [()]
        out = []
        for first in range(min(remaining, cap), 0, -1):
            for rest in rec(remaining - first, first):
                out.append((first,) + rest)
        return out

    parts = rec(total, max_part)
    if require_max:
        parts = [p for p in parts if p and p[0] == max_part]
    return [Partition(p) for p in parts]
