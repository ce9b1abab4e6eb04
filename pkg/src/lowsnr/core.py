"""Discrete mixtures, dense symmetric moment tensors, SNR, normalization.

Conventions used throughout the package:

* a mixture is ``K`` centers in ``R^d`` with known positive weights that
  sum to one;
* the order-``k`` moment tensor is the exact weighted sum of center outer
  powers (no sampling anywhere in this module);
* the noise level enters only through ``sigma`` (isotropic covariance
  ``sigma^2 I``), and SNR is the largest squared center deviation from
  the first moment, divided by ``sigma^2``.
"""

import string
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .exceptions import DegenerateMixtureError

__all__ = [
    "DiscreteMixture",
    "SymTensor",
    "NoiseScale",
    "moment_tensor",
    "tensor_inner",
    "snr",
    "normalize",
    "max_support_distance",
]

WEIGHT_TOL = 1e-12
_MIN_WEIGHT = 1e-12


@dataclass(frozen=True, eq=False)
class NoiseScale:
    """Isotropic noise level sigma > 0."""

    sigma: float

    def __post_init__(self):
        if not np.isfinite(self.sigma) or self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True, eq=False)
class DiscreteMixture:
    """K point masses in R^d with strictly positive weights summing to 1.

    Arrays are copied, cast to float64, and frozen; instances are immutable
    and safe to share across threads.  Weights below 1e-12 are rejected at
    construction (EM step sizes divide by them).
    """

    centers: np.ndarray  # (K, d)
    weights: np.ndarray  # (K,)

    def __post_init__(self):
        centers = np.ascontiguousarray(self.centers, dtype=np.float64)
        weights = np.ascontiguousarray(self.weights, dtype=np.float64)
        if centers.ndim != 2 or centers.shape[0] < 1 or centers.shape[1] < 1:
            raise ValueError(f"centers must be (K, d) with K, d >= 1, got shape {centers.shape}")
        if weights.shape != (centers.shape[0],):
            raise ValueError(
                f"weights shape {weights.shape} does not match K={centers.shape[0]}"
            )
        if not np.all(np.isfinite(centers)) or not np.all(np.isfinite(weights)):
            raise ValueError("centers and weights must be finite")
        if np.any(weights < _MIN_WEIGHT):
            raise ValueError(f"weights must all be >= {_MIN_WEIGHT}")
        if abs(weights.sum() - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights must sum to 1 within {WEIGHT_TOL}, got {weights.sum()!r}")
        centers.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "weights", weights)

    @property
    def n_components(self) -> int:
        return self.centers.shape[0]

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    def with_centers(self, centers: np.ndarray) -> "DiscreteMixture":
        """Same weights, new centers (the EM/optimizer update path)."""
        return DiscreteMixture(centers, self.weights)


@dataclass(frozen=True, eq=False)
class SymTensor:
    """Dense order-k tensor over R^d, stored as a (d,)*k float64 array.

    Dense storage is deliberate: target sizes are d <= 8, k <= 6, so at
    most ~2.6e5 entries, and dense keeps every contraction a one-liner.
    """

    order: int
    dim: int
    entries: np.ndarray

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"order must be >= 1, got {self.order}")
        entries = np.ascontiguousarray(self.entries, dtype=np.float64)
        if entries.shape != (self.dim,) * self.order:
            raise ValueError(
                f"entries shape {entries.shape} != {(self.dim,) * self.order}"
            )
        if not np.all(np.isfinite(entries)):
            raise ValueError("tensor entries must be finite")
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)

    def norm(self) -> float:
        """Frobenius norm of the vectorized tensor."""
        return float(np.linalg.norm(self.entries.ravel()))

    def __sub__(self, other: "SymTensor") -> "SymTensor":
        _check_same_shape(self, other)
        return SymTensor(self.order, self.dim, self.entries - other.entries)

    def __add__(self, other: "SymTensor") -> "SymTensor":
        _check_same_shape(self, other)
        return SymTensor(self.order, self.dim, self.entries + other.entries)


def _check_same_shape(a: SymTensor, b: SymTensor):
    if a.order != b.order or a.dim != b.dim:
        raise ValueError(
            f"tensor shape mismatch: order {a.order} dim {a.dim} vs order {b.order} dim {b.dim}"
        )


def moment_tensor(mix: DiscreteMixture, k: int) -> SymTensor:
    """Order-k moment tensor sum_j alpha_j theta_j^(x k), computed exactly.

    Raises ValueError for k < 1.
    """
    if k < 1:
        raise ValueError(f"moment order must be >= 1, got {k}")
    letters = string.ascii_lowercase[:k]
    if k > len(string.ascii_lowercase):
        raise ValueError(f"moment order {k} not supported")
    subscripts = "z," + ",".join(f"z{c}" for c in letters) + "->" + letters
    entries = np.einsum(subscripts, mix.weights, *([mix.centers] * k))
    return SymTensor(k, mix.dim, entries)


def tensor_inner(t: SymTensor, s: SymTensor) -> float:
    """Entry-wise inner product of vectorizations; <T, T> = ||T||^2."""
    _check_same_shape(t, s)
    return float(np.dot(t.entries.ravel(), s.entries.ravel()))


def outer_power(x: np.ndarray, k: int) -> SymTensor:
    """Rank-one tensor x^(x k)."""
    x = np.asarray(x, dtype=np.float64)
    entries = reduce(np.multiply.outer, [x] * k)
    return SymTensor(k, x.shape[0], entries)


def snr(mix: DiscreteMixture, ns: NoiseScale) -> float:
    """max_j ||theta_j - T_1||^2 / sigma^2."""
    t1 = mix.weights @ mix.centers
    dev = np.linalg.norm(mix.centers - t1, axis=1)
    return float(dev.max() ** 2 / ns.sigma**2)


def normalize(mix: DiscreteMixture) -> tuple[DiscreteMixture, np.ndarray, float]:
    """Shift the first moment to zero and scale the max center norm to 1.

    Returns ``(normalized, shift, scale)`` with
    ``original centers = scale * normalized centers + shift``.
    Raises DegenerateMixtureError when all centers coincide.
    """
    shift = mix.weights @ mix.centers
    shifted = mix.centers - shift
    scale = float(np.linalg.norm(shifted, axis=1).max())
    if scale == 0.0:
        raise DegenerateMixtureError("all centers equal; normalization scale undefined")
    return DiscreteMixture(shifted / scale, mix.weights), shift, scale


def max_support_distance(mix_a: DiscreteMixture, mix_b: DiscreteMixture) -> float:
    """max over center pairs of the Euclidean distance (delta of the expansion error bound)."""
    if mix_a.dim != mix_b.dim:
        raise ValueError(f"dimension mismatch: {mix_a.dim} vs {mix_b.dim}")
    diff = mix_a.centers[:, None, :] - mix_b.centers[None, :, :]
    return float(np.sqrt((diff**2).sum(axis=2)).max())
