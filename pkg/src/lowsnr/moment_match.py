"""Least-squares moment matching and the stagewise variety solver.

The global objective is sum_k lambda_k ||T_k(mix) - T_k*||^2.  Taking
lambda_1 >> lambda_2 >> ... reduces it to the stagewise sequence

    stage k:  minimize ||T_k - T_k*||^2  subject to  T_ell = T_ell*, ell < k,

which is solved here by quadratic-penalty continuation: the constraint
block is weighted by mu and mu is increased geometrically, each stage
warm-starting from the previous one.  The inner solver is gradient
descent with Armijo backtracking; trial steps carry over between
iterations (growing on acceptance) because the landscapes here have
quartic saddles that fixed unit steps cannot traverse.
"""

from dataclasses import dataclass

import numpy as np

from .core import DiscreteMixture, SymTensor, moment_tensor

__all__ = [
    "MomentObjective",
    "StageResult",
    "PenaltySchedule",
    "objective_value_and_grad",
    "stagewise_solve",
    "two_mixture_coordinates",
    "two_mixture_from_coordinates",
    "variety_residual",
]


@dataclass(frozen=True, eq=False)
class MomentObjective:
    """Fixed truth moments T_1*..T_m* with positive stage weights."""

    truth_moments: tuple[SymTensor, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.truth_moments) != len(self.weights):
            raise ValueError("need one weight per moment order")
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")
        for k, t in enumerate(self.truth_moments, start=1):
            if t.order != k:
                raise ValueError(f"truth_moments[{k - 1}] must have order {k}")

    @property
    def max_order(self) -> int:
        return len(self.truth_moments)

    @classmethod
    def from_mixture(cls, truth: DiscreteMixture, max_order: int, weights=None):
        tensors = tuple(moment_tensor(truth, k) for k in range(1, max_order + 1))
        if weights is None:
            weights = (1.0,) * max_order
        return cls(tensors, tuple(float(w) for w in weights))


def _contract_leading(entries: np.ndarray, vec: np.ndarray, times: int) -> np.ndarray:
    """Contract the first ``times`` indices of a dense tensor against ``vec``."""
    out = entries
    for _ in range(times):
        out = np.tensordot(vec, out, axes=([0], [0]))
    return out


def objective_value_and_grad(
    obj: MomentObjective, mix: DiscreteMixture
) -> tuple[float, np.ndarray]:
    """Value sum_k lambda_k ||T_k - T_k*||^2 and its per-center gradient.

    By symmetry of T_k the gradient for center j is
    2 k lambda_k alpha_j * contract(T_k - T_k*, theta_j^(x (k-1))).
    """
    value = 0.0
    grads = np.zeros_like(mix.centers)
    for k, (t_star, lam) in enumerate(zip(obj.truth_moments, obj.weights), start=1):
        if t_star.dim != mix.dim:
            raise ValueError(f"moment order {k}: dim {t_star.dim} != mixture dim {mix.dim}")
        diff = moment_tensor(mix, k).entries - t_star.entries
        value += lam * float(np.dot(diff.ravel(), diff.ravel()))
        for j in range(mix.n_components):
            c = _contract_leading(diff, mix.centers[j], k - 1)
            grads[j] += lam * 2.0 * k * mix.weights[j] * c
    return value, grads


def variety_residual(mix: DiscreteMixture, truth: DiscreteMixture, k: int) -> float:
    """max_{ell <= k} ||T_ell(mix) - T_ell(truth)|| (membership residual of V_k)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return max(
        (moment_tensor(mix, ell) - moment_tensor(truth, ell)).norm()
        for ell in range(1, k + 1)
    )


def two_mixture_coordinates(mix: DiscreteMixture) -> tuple[np.ndarray, np.ndarray]:
    """(alpha, beta) = (midpoint, difference) coordinates of a uniform 2-mixture."""
    if mix.n_components != 2:
        raise ValueError(f"need K = 2, got K = {mix.n_components}")
    if abs(mix.weights[0] - 0.5) > 1e-12:
        raise ValueError("need uniform weights (1/2, 1/2)")
    alpha = 0.5 * (mix.centers[0] + mix.centers[1])
    beta = mix.centers[0] - mix.centers[1]
    return alpha, beta


def two_mixture_from_coordinates(alpha: np.ndarray, beta: np.ndarray) -> DiscreteMixture:
    """Inverse of two_mixture_coordinates."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    centers = np.stack([alpha + 0.5 * beta, alpha - 0.5 * beta])
    return DiscreteMixture(centers, np.array([0.5, 0.5]))


@dataclass(frozen=True)
class PenaltySchedule:
    """Penalty continuation and inner-descent knobs."""

    mu_init: float = 10.0
    mu_growth: float = 10.0
    rounds: int = 8
    max_inner: int = 5000
    gtol: float = 1e-13
    practical_gtol: float = 1e-9  # stall exits count as converged below this
    armijo_c: float = 1e-4
    shrink: float = 0.5
    init_step: float = 1.0
    step_growth: float = 2.0
    max_step: float = 1e12
    stall_tol: float = 1e-12
    stall_iters: int = 50


@dataclass(frozen=True, eq=False)
class StageResult:
    stage: int
    solution: DiscreteMixture
    objective_value: float
    constraint_violation: float
    converged: bool
    inner_iterations: int


def _descend(value_and_grad, x0: np.ndarray, cfg: PenaltySchedule, step0: float):
    """Armijo gradient descent; returns (x, converged, iterations, last step)."""
    x = x0
    f, g = value_and_grad(x)
    step = step0
    stall = 0
    for it in range(cfg.max_inner):
        gnorm = np.abs(g).max()
        if gnorm <= cfg.gtol:
            return x, True, it, step
        gsq = float(np.dot(g.ravel(), g.ravel()))
        s = step
        accepted = False
        while s > 1e-20:
            trial = x - s * g
            f_trial, g_trial = value_and_grad(trial)
            if np.isfinite(f_trial) and f_trial <= f - cfg.armijo_c * s * gsq:
                accepted = True
                break
            s *= cfg.shrink
        if not accepted:
            # no descent direction representable: stationary to float precision
            return x, np.abs(g).max() <= cfg.practical_gtol, it, step
        drop = f - f_trial
        x, f, g = trial, f_trial, g_trial
        step = min(cfg.max_step, s * cfg.step_growth)
        if drop <= cfg.stall_tol * max(1.0, abs(f)):
            stall += 1
            if stall >= cfg.stall_iters:
                return x, np.abs(g).max() <= cfg.practical_gtol, it + 1, step
        else:
            stall = 0
    return x, np.abs(g).max() <= cfg.practical_gtol, cfg.max_inner, step


def stagewise_solve(
    truth: DiscreteMixture,
    init: DiscreteMixture,
    m: int,
    schedule: PenaltySchedule = PenaltySchedule(),
) -> list[StageResult]:
    """Solve the stagewise moment-matching problems for orders 1..m.

    Stage k minimizes ||T_k - T_k*||^2 + mu * sum_{ell<k} ||T_ell - T_ell*||^2
    with mu increased geometrically; stage k+1 starts from stage k's
    solution.  A stage that stalls before reaching the gradient tolerance
    is marked converged=False (its best iterate is still reported).
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if truth.dim != init.dim:
        raise ValueError("truth and init dimensions differ")
    truth_moments = tuple(moment_tensor(truth, k) for k in range(1, m + 1))
    weights = init.weights
    shape = init.centers.shape
    results: list[StageResult] = []
    current = init.centers.copy()

    for k in range(1, m + 1):
        def make_obj(mu: float, k=k):
            lams = tuple([mu] * (k - 1) + [1.0])
            obj = MomentObjective(truth_moments[:k], lams)

            def value_and_grad(x: np.ndarray):
                mix = DiscreteMixture(x.reshape(shape), weights)
                v, g = objective_value_and_grad(obj, mix)
                return v, g.ravel()

            return value_and_grad

        converged = False
        iterations = 0
        step = schedule.init_step
        x = current.ravel()
        if k == 1:
            x, converged, iterations, step = _descend(
                make_obj(0.0), x, schedule, schedule.init_step
            )
        else:
            mu = schedule.mu_init
            for _ in range(schedule.rounds):
                x, converged, its, step = _descend(make_obj(mu), x, schedule, step)
                iterations += its
                mu *= schedule.mu_growth
        current = x.reshape(shape)
        solution = DiscreteMixture(current, weights)
        stage_obj = (moment_tensor(solution, k) - truth_moments[k - 1]).norm() ** 2
        violation = 0.0 if k == 1 else max(
            (moment_tensor(solution, ell) - truth_moments[ell - 1]).norm()
            for ell in range(1, k)
        )
        results.append(
            StageResult(
                stage=k,
                solution=solution,
                objective_value=stage_obj,
                constraint_violation=violation,
                converged=converged,
                inner_iterations=iterations,
            )
        )
    return results
