"""Orbit-retrieval mixtures: finite orthogonal group actions on R^d.

Covers cyclic coordinate shifts (MRA), uniformly discretized planar
rotations, heterogeneous multi-seed orbits, and the Haar inner-product
identity that collapses cross terms of the likelihood expansion for
orbit models.
"""

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .core import WEIGHT_TOL, DiscreteMixture, moment_tensor, tensor_inner
from .exceptions import PreconditionError

__all__ = [
    "FiniteGroupAction",
    "cyclic_group",
    "planar_rotation_group",
    "orbit_mixture",
    "check_haar_identity",
]

_ORTHO_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class FiniteGroupAction:
    """A list of d x d orthogonal matrices with a probability vector.

    Group elements are stored as explicit matrices (not permutation
    indices) so cyclic shifts and rotations share one code path.
    """

    elements: np.ndarray  # (n, d, d)
    weights: np.ndarray  # (n,)

    def __post_init__(self):
        elements = np.ascontiguousarray(self.elements, dtype=np.float64)
        weights = np.ascontiguousarray(self.weights, dtype=np.float64)
        if elements.ndim != 3 or elements.shape[1] != elements.shape[2]:
            raise ValueError(f"elements must be (n, d, d), got {elements.shape}")
        if weights.shape != (elements.shape[0],):
            raise ValueError("weights length must match number of elements")
        eye = np.eye(elements.shape[1])
        for i, g in enumerate(elements):
            if np.abs(g.T @ g - eye).max() > _ORTHO_TOL:
                raise ValueError(f"element {i} is not orthogonal within {_ORTHO_TOL}")
        if np.any(weights <= 0):
            raise ValueError("group weights must be positive")
        if abs(weights.sum() - 1.0) > WEIGHT_TOL:
            raise ValueError(f"group weights must sum to 1 within {WEIGHT_TOL}")
        elements.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "weights", weights)

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    @property
    def size(self) -> int:
        return self.elements.shape[0]

    def is_uniform(self) -> bool:
        return bool(np.abs(self.weights - 1.0 / self.size).max() <= WEIGHT_TOL)


def cyclic_group(d: int) -> FiniteGroupAction:
    """The d cyclic-shift permutation matrices (g_j theta)_k = theta_{(j+k) mod d}."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    mats = np.zeros((d, d, d))
    for j in range(d):
        for k in range(d):
            mats[j, k, (j + k) % d] = 1.0
    return FiniteGroupAction(mats, np.full(d, 1.0 / d))


def planar_rotation_group(n_steps: int) -> FiniteGroupAction:
    """n_steps uniform 2x2 rotations at angles 2*pi*j/n_steps.

    This is the uniform discretization of the continuous planar-rotation
    orbit model; moments converge to the continuous ones as n_steps grows.
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    angles = 2.0 * np.pi * np.arange(n_steps) / n_steps
    mats = np.empty((n_steps, 2, 2))
    mats[:, 0, 0] = np.cos(angles)
    mats[:, 0, 1] = -np.sin(angles)
    mats[:, 1, 0] = np.sin(angles)
    mats[:, 1, 1] = np.cos(angles)
    return FiniteGroupAction(mats, np.full(n_steps, 1.0 / n_steps))


def orbit_mixture(
    group: FiniteGroupAction, seeds: Sequence[tuple[np.ndarray, float]]
) -> DiscreteMixture:
    """Mixture with centers g_j s_i and weights gamma_j * p_i.

    ``seeds`` is a list of (vector, probability) pairs; one seed gives the
    homogeneous orbit model, several give heterogeneous orbit retrieval.
    """
    if not seeds:
        raise ValueError("at least one seed is required")
    probs = np.array([p for _, p in seeds], dtype=np.float64)
    if abs(probs.sum() - 1.0) > WEIGHT_TOL:
        raise ValueError(f"seed probabilities must sum to 1 within {WEIGHT_TOL}")
    centers = []
    weights = []
    for vec, p in seeds:
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (group.dim,):
            raise ValueError(
                f"seed dimension {vec.shape} does not match group dimension {group.dim}"
            )
        centers.append(group.elements @ vec)  # (n, d)
        weights.append(group.weights * p)
    return DiscreteMixture(np.concatenate(centers), np.concatenate(weights))


def check_haar_identity(
    group: FiniteGroupAction,
    theta: np.ndarray,
    theta_star: np.ndarray,
    I: Sequence[int],
    J: Sequence[int],
    max_order: int = 8,
) -> float:
    """Residual of the orbit inner-product identity under Haar weights.

    With T_k the order-k moment tensors of the orbits of ``theta`` and
    ``theta_star`` and k = sum(I) + sum(J), the identity is

        < T_k , (x)_{i in I} T_i (x) (x)_{j in J} T_j* >
            = prod_{i in I} <T_i, T_i> * prod_{j in J} <T_j, T_j*>.

    Returns |lhs - rhs|, both sides computed by dense contraction.
    """
    if not group.is_uniform():
        raise PreconditionError("Haar identity requires uniform group weights")
    I = [int(i) for i in I]
    J = [int(j) for j in J]
    if any(i < 1 for i in I + J):
        raise ValueError("I and J must contain positive integers")
    k = sum(I) + sum(J)
    if k < 1 or k > max_order:
        raise ValueError(f"total order {k} outside (0, {max_order}]")

    mix = orbit_mixture(group, [(np.asarray(theta, dtype=np.float64), 1.0)])
    mix_star = orbit_mixture(group, [(np.asarray(theta_star, dtype=np.float64), 1.0)])
    t = {i: moment_tensor(mix, i) for i in set(I + J + [k])}
    t_star = {j: moment_tensor(mix_star, j) for j in set(J)}

    factors = [t[i].entries for i in I] + [t_star[j].entries for j in J]
    big = reduce(np.multiply.outer, factors)
    lhs = float(np.dot(t[k].entries.ravel(), big.ravel()))
    rhs = 1.0
    for i in I:
        rhs *= tensor_inner(t[i], t[i])
    for j in J:
        rhs *= tensor_inner(t[j], t_star[j])
    return abs(lhs - rhs)
