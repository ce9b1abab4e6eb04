"""Critical points of 1-D moment matching via power sums.

For a K-component mixture on the line with known weights alpha, the
moment constraints are power sums p_ell(x) = sum_j alpha_j x_j^ell.  On
the variety V_n = {p_ell = p_ell*, ell <= n}, the critical points of the
next objective (p_{n+1} - p_{n+1}*)^2 are exactly the points with n
distinct coordinates; their type is read off the multiplicity vector
(m_1, ..., m_n) of the descending distinct values together with the sign
of p_{n+1}(x) - p_{n+1}*:

* repeats only at odd positions:  local min iff p_{n+1}(x) > p_{n+1}*;
* repeats only at even positions: local min iff p_{n+1}(x) < p_{n+1}*;
* repeats at both parities: saddle.

``restricted_hessian_classify`` is the independent oracle: it solves for
Lagrange multipliers and checks the definiteness of the projected
Hessian on the constraint tangent space.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DegenerateSolutionError,
    NotACriticalPointError,
    NotFoundError,
    OnVarietyError,
    PreconditionError,
)
from .rng import generator

__all__ = [
    "PowerSumSystem",
    "CriticalPoint1D",
    "power_sum",
    "find_critical_point",
    "find_all_critical_points",
    "classify_by_multiplicity",
    "restricted_hessian_classify",
    "restricted_hessian_spectrum",
    "power_sum_problem",
    "iter_assignments",
    "compositions",
    "draw_generic_values",
]

# Collisions appear with a gap of order sqrt(newton tol) because the
# constraint residual is quadratic in the gap at a tangency; detection
# below ~1e-6 is numerically impossible, and generic solutions separate
# by orders of magnitude more than this.
_DISTINCT_TOL = 1e-5
_ON_VARIETY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class PowerSumSystem:
    """Known weights, ground-truth values, and their power sums."""

    weights: np.ndarray  # (K,)
    truth_values: np.ndarray  # (K,)
    p_max: int = 0  # defaults to K + 1

    def __post_init__(self):
        w = np.ascontiguousarray(self.weights, dtype=np.float64)
        v = np.ascontiguousarray(self.truth_values, dtype=np.float64)
        if w.ndim != 1 or v.shape != w.shape:
            raise ValueError("weights and truth_values must be 1-D arrays of equal length")
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be positive and sum to 1")
        p_max = self.p_max if self.p_max >= 1 else len(w) + 1
        w.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "truth_values", v)
        object.__setattr__(self, "p_max", p_max)

    @property
    def n_components(self) -> int:
        return len(self.weights)

    @property
    def truth_power_sums(self) -> np.ndarray:
        """p_1*, ..., p_{p_max}* of the truth."""
        return np.array(
            [self.weights @ self.truth_values**ell for ell in range(1, self.p_max + 1)]
        )

    def truth_power_sum(self, ell: int) -> float:
        return float(self.weights @ self.truth_values**ell)


@dataclass(frozen=True, eq=False)
class CriticalPoint1D:
    """A critical point of stage n + 1 restricted to V_n."""

    values: np.ndarray  # (n,) strictly decreasing
    multiplicities: tuple[int, ...]
    assignment: tuple[int, ...]  # slot j carries values[assignment[j]]
    stage: int
    p_next: float
    classification: str | None = None

    @property
    def full_point(self) -> np.ndarray:
        return self.values[np.array(self.assignment)]


def power_sum(sys: PowerSumSystem, x: np.ndarray, ell: int) -> float:
    """p_ell(x) = sum_j alpha_j x_j^ell."""
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    x = np.asarray(x, dtype=float)
    return float(sys.weights @ x**ell)


def compositions(total: int, n: int):
    """Ordered positive integer compositions of ``total`` into n parts."""
    if n == 1:
        yield (total,)
        return
    for first in range(1, total - n + 2):
        for rest in compositions(total - first, n - 1):
            yield (first,) + rest


def iter_assignments(k: int, multiplicities: tuple[int, ...]):
    """All slot->group maps with the given group sizes.

    Yields tuples a of length k with a[j] = group index of slot j, where
    group i has exactly multiplicities[i] slots.
    """
    if sum(multiplicities) != k:
        raise ValueError("multiplicities must sum to the number of slots")

    def rec(remaining: frozenset, gi: int):
        if gi == len(multiplicities):
            yield {}
            return
        for chosen in itertools.combinations(sorted(remaining), multiplicities[gi]):
            for rest in rec(remaining - set(chosen), gi + 1):
                d = dict(rest)
                for slot in chosen:
                    d[slot] = gi
                yield d

    for mapping in rec(frozenset(range(k)), 0):
        yield tuple(mapping[j] for j in range(k))


def _newton_reduced(masses, targets, v0, max_iter=60, tol=1e-12):
    """Damped Newton for sum_i M_i v_i^ell = targets[ell-1], ell = 1..n.

    Fails fast (returns None) when damping stalls: most assignments have
    no real root and burning the full budget on them dominates sweep cost.
    """
    n = len(masses)
    v = v0.astype(float).copy()
    scale = 1.0 + np.abs(targets).max()
    ells = np.arange(1, n + 1)[:, None]

    def residual(vv):
        # powers[l-1, i] = v_i^(l-1); residual_l = sum_i M_i v_i^l - p_l*
        powers = vv[None, :] ** (ells - 1)
        return (powers * vv[None, :]) @ masses - targets, powers

    r, powers = residual(v)
    rsq = float(r @ r)
    slow = 0
    for _ in range(max_iter):
        if np.abs(r).max() <= tol * scale:
            return v
        jac = ells * masses[None, :] * powers
        try:
            delta = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        while lam > 1e-6:
            v_trial = v + lam * delta
            r_trial, p_trial = residual(v_trial)
            rsq_trial = float(r_trial @ r_trial)
            if rsq_trial <= (1.0 - 1e-4 * lam) * rsq:
                break
            lam *= 0.5
        else:
            return None
        slow = slow + 1 if rsq_trial > 0.25 * rsq else 0
        if slow >= 6:
            return None
        v, r, powers, rsq = v_trial, r_trial, p_trial, rsq_trial
    return v if np.abs(r).max() <= tol * scale else None


def _stationarity_residual(sys: PowerSumSystem, x: np.ndarray, n: int) -> float:
    """Relative residual of projecting grad p_{n+1} onto span{grad p_ell}."""
    jac = np.empty((n, sys.n_components))
    for ell in range(1, n + 1):
        jac[ell - 1] = ell * sys.weights * x ** (ell - 1)
    target = (n + 1) * sys.weights * x**n
    coef, *_ = np.linalg.lstsq(jac.T, target, rcond=None)
    resid = np.linalg.norm(jac.T @ coef - target)
    return float(resid / (1.0 + np.linalg.norm(target)))


def _solve_assignment(sys, multiplicities, assignment, rng, max_starts):
    """Newton multistart for one slot grouping; returns list of (v, collided)."""
    n = len(multiplicities)
    masses = np.zeros(n)
    for slot, gi in enumerate(assignment):
        masses[gi] += sys.weights[slot]
    targets = np.array([sys.truth_power_sum(ell) for ell in range(1, n + 1)])

    group_mean = np.zeros(n)
    for slot, gi in enumerate(assignment):
        group_mean[gi] += sys.weights[slot] * sys.truth_values[slot]
    group_mean /= masses

    lo, hi = sys.truth_values.min() - 1.0, sys.truth_values.max() + 1.0
    outcomes = []
    seen = set()
    for start in range(max_starts):
        if start == 0:
            v0 = group_mean
        else:
            v0 = rng.uniform(lo, hi, size=n)
        v = _newton_reduced(masses, targets, v0)
        if v is None:
            continue
        key = tuple(np.round(v, 9))
        if key in seen:
            continue
        seen.add(key)
        collided = n > 1 and np.min(np.diff(np.sort(v))) < _DISTINCT_TOL
        outcomes.append((v, collided))
    return outcomes


def _build_point(sys, multiplicities, assignment, v) -> CriticalPoint1D:
    """Sort values descending, permute groups to match, and certify."""
    n = len(multiplicities)
    order = np.argsort(-v)
    values = v[order]
    rank_of = np.empty(n, dtype=int)
    rank_of[order] = np.arange(n)
    mults = tuple(int(multiplicities[g]) for g in order)
    new_assignment = tuple(int(rank_of[g]) for g in assignment)
    x = values[np.array(new_assignment)]
    srel = _stationarity_residual(sys, x, n)
    if srel > 1e-8:
        raise NotACriticalPointError(
            f"stationarity residual {srel:.3e} > 1e-8 after Newton convergence"
        )
    return CriticalPoint1D(
        values=values,
        multiplicities=mults,
        assignment=new_assignment,
        stage=n,
        p_next=power_sum(sys, x, n + 1),
    )


def find_critical_point(
    sys: PowerSumSystem,
    multiplicities,
    assignment: tuple[int, ...] | None = None,
    seed: int = 0,
    max_starts: int = 20,
) -> CriticalPoint1D:
    """Find a critical point with the requested multiplicity vector.

    ``multiplicities`` orders the repeat counts by descending value.  When
    ``assignment`` is None, slot groupings are enumerated exhaustively
    (K <= 6); pass an explicit slot->group tuple beyond that.  Raises
    NotFoundError when the multistart budget is exhausted and
    DegenerateSolutionError when solutions exist but their values collide.
    """
    multiplicities = tuple(int(m) for m in multiplicities)
    k = sys.n_components
    n = len(multiplicities)
    if any(m < 1 for m in multiplicities) or sum(multiplicities) != k:
        raise ValueError(f"multiplicities must be positive and sum to K = {k}")
    if not 1 <= n <= k:
        raise ValueError(f"stage must be in [1, {k}], got {n}")
    if assignment is None:
        if k > 6:
            raise ValueError("explicit assignment required for K > 6")
        candidates = list(iter_assignments(k, multiplicities))
    else:
        assignment = tuple(int(a) for a in assignment)
        if len(assignment) != k or sorted(assignment) != sorted(
            i for i, m in enumerate(multiplicities) for _ in range(m)
        ):
            raise ValueError("assignment does not realize the multiplicity vector")
        candidates = [assignment]

    rng = generator(seed)
    saw_collision = False
    for cand in candidates:
        for v, collided in _solve_assignment(sys, multiplicities, cand, rng, max_starts):
            if collided:
                saw_collision = True
                continue
            point = _build_point(sys, multiplicities, cand, v)
            if point.multiplicities == multiplicities:
                return point
    if saw_collision:
        raise DegenerateSolutionError(
            f"solutions for multiplicities {multiplicities} collide within {_DISTINCT_TOL}"
        )
    raise NotFoundError(
        f"no critical point with multiplicities {multiplicities} found "
        f"({max_starts} starts per assignment)"
    )


def find_all_critical_points(
    sys: PowerSumSystem, stage: int, seed: int = 0, max_starts: int = 4
) -> list[CriticalPoint1D]:
    """Sweep all multiplicity vectors and slot groupings at a given stage.

    Returns deduplicated critical points (collided solutions are skipped).
    Intended for K <= 6 landscape sweeps.
    """
    k = sys.n_components
    if not 1 <= stage <= k:
        raise ValueError(f"stage must be in [1, {k}]")
    rng = generator(seed)
    found: dict[tuple, CriticalPoint1D] = {}
    for comp in compositions(k, stage):
        for cand in iter_assignments(k, comp):
            for v, collided in _solve_assignment(sys, comp, cand, rng, max_starts):
                if collided:
                    continue
                point = _build_point(sys, comp, cand, v)
                key = tuple(np.round(point.full_point, 9))
                found.setdefault(key, point)
    return list(found.values())


def classify_by_multiplicity(cp: CriticalPoint1D, sys: PowerSumSystem) -> str:
    """Min/max/saddle from the multiplicity vector and sign of p_{n+1} - p*.

    Raises OnVarietyError when p_{n+1}(x) = p_{n+1}* within 1e-10 (the
    point lies in V_{n+1} and the proposition does not apply).
    """
    p_star = sys.truth_power_sum(cp.stage + 1)
    gap = cp.p_next - p_star
    if abs(gap) <= _ON_VARIETY_TOL:
        raise OnVarietyError(
            f"p_{cp.stage + 1}(x) equals the truth value within {_ON_VARIETY_TOL}"
        )
    repeats = [i + 1 for i, m in enumerate(cp.multiplicities) if m > 1]  # 1-indexed
    if not repeats:
        raise PreconditionError("all multiplicities are 1; the point is the truth (n = K)")
    odd = all(pos % 2 == 1 for pos in repeats)
    even = all(pos % 2 == 0 for pos in repeats)
    if odd:
        return "local-min" if gap > 0 else "local-max"
    if even:
        return "local-min" if gap < 0 else "local-max"
    return "saddle"


def restricted_hessian_spectrum(f, constraints, x) -> np.ndarray:
    """Eigenvalues of the projected form hess f - sum lambda_j hess g_j.

    ``f`` and each element of ``constraints`` are callables returning
    (value, gradient, hessian); constraint values must be ~0 at x (their
    level is already subtracted).  Multipliers come from least squares,
    the form is projected onto an orthonormal basis of the constraint
    tangent space.
    """
    x = np.asarray(x, dtype=float)
    k = len(x)
    n = len(constraints)
    if n >= k:
        raise ValueError("need at least one tangent direction (len(constraints) < len(x))")

    vals, jac_rows, g_hessians = [], [], []
    for g in constraints:
        gv, gg, gh = g(x)
        vals.append(gv)
        jac_rows.append(gg)
        g_hessians.append(gh)
    if np.abs(vals).max() > 1e-8:
        raise PreconditionError(
            f"constraint residual {np.abs(vals).max():.3e} > 1e-8 at x"
        )
    jac = np.asarray(jac_rows)
    svals = np.linalg.svd(jac, compute_uv=False)
    if svals.min() <= 1e-8:
        raise PreconditionError(
            f"constraint gradients nearly dependent (smallest singular value {svals.min():.3e})"
        )

    _, grad_f, hess_f = f(x)
    lam, *_ = np.linalg.lstsq(jac.T, grad_f, rcond=None)
    mult_resid = np.linalg.norm(jac.T @ lam - grad_f) / (1.0 + np.linalg.norm(grad_f))
    if mult_resid > 1e-6:
        raise NotACriticalPointError(
            f"multiplier residual {mult_resid:.3e} > 1e-6; x is not a critical point"
        )

    h = hess_f - np.tensordot(lam, np.asarray(g_hessians), axes=1)
    _, _, vt = np.linalg.svd(jac, full_matrices=True)
    basis = vt[n:].T  # (k, k - n) orthonormal tangent basis
    hp = basis.T @ h @ basis
    hp = 0.5 * (hp + hp.T)
    return np.linalg.eigvalsh(hp)


def restricted_hessian_classify(f, constraints, x, tol: float | None = None) -> str:
    """Classify a constrained critical point via the projected Hessian.

    Eigenvalues within tol of zero make the result "inconclusive"
    (default tol scales with the spectrum magnitude).
    """
    eig = restricted_hessian_spectrum(f, constraints, x)
    if tol is None:
        tol = 1e-7 * (1.0 + np.abs(eig).max())
    if np.any(np.abs(eig) < tol):
        return "inconclusive"
    if np.all(eig > 0):
        return "local-min"
    if np.all(eig < 0):
        return "local-max"
    return "saddle"


def power_sum_problem(sys: PowerSumSystem, stage: int):
    """(f, constraints) callables for the stage objective on V_stage.

    f(x) = 0.5 (p_{stage+1}(x) - p*)^2; constraints are the residuals
    p_ell(x) - p_ell* for ell = 1..stage.  Each callable returns
    (value, gradient, hessian) for use with restricted_hessian_classify.
    """
    alpha = sys.weights
    nxt = stage + 1
    p_star_next = sys.truth_power_sum(nxt)

    def constraint(ell):
        target = sys.truth_power_sum(ell)

        def g(x):
            x = np.asarray(x, dtype=float)
            value = float(alpha @ x**ell) - target
            grad = ell * alpha * x ** (ell - 1)
            if ell >= 2:
                hess = np.diag(ell * (ell - 1) * alpha * x ** (ell - 2))
            else:
                hess = np.zeros((len(x), len(x)))
            return value, grad, hess

        return g

    def f(x):
        x = np.asarray(x, dtype=float)
        gap = float(alpha @ x**nxt) - p_star_next
        grad_p = nxt * alpha * x ** (nxt - 1)
        hess_p = np.diag(nxt * (nxt - 1) * alpha * x ** (nxt - 2))
        value = 0.5 * gap * gap
        grad = gap * grad_p
        hess = gap * hess_p + np.outer(grad_p, grad_p)
        return value, grad, hess

    return f, [constraint(ell) for ell in range(1, stage + 1)]


def draw_generic_values(k: int, rng: np.random.Generator, min_gap: float = 1e-3):
    """Truth values with pairwise gaps >= min_gap (redraw on degeneracy)."""
    while True:
        vals = rng.uniform(-1.5, 1.5, size=k)
        if k == 1 or np.min(np.diff(np.sort(vals))) >= min_gap:
            return vals
