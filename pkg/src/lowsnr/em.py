"""Standard and gradient EM for mixtures with known weights.

Both updates are driven by the posterior-weight moments E[w] and E[wY]
of an evaluator panel, so standard EM, gradient EM, and the population
gradient all share one numeric path.  Standard EM per center is exactly
a gradient-ascent step with step size tau_chi = sigma^2 / (alpha_chi E[w]);
for orbit models (single generating vector, uniform Haar weights) the
shared step size is sigma^2 exactly.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core import DiscreteMixture, NoiseScale
from .exceptions import NumericalDegeneracyError, PreconditionError
from .groups import FiniteGroupAction, orbit_mixture
from .likelihood import (
    LikelihoodEvaluator,
    Quadrature,
    fit_loglog_slope,
    grad_population_loglik,
    population_loglik,
    posterior_moments,
)

__all__ = [
    "EMState",
    "EMTrajectory",
    "EMConfig",
    "make_state",
    "em_step",
    "gradient_em_step",
    "run_em",
    "weight_expectation",
    "t1_one_step_scan",
    "T1ScanResult",
    "orbit_em_step",
    "orbit_gradient",
    "loglik_is_monotone",
]

_EW_FLOOR = 1e-300
_DIVERGENCE_NORM = 1e6


@dataclass(frozen=True, eq=False)
class EMState:
    mix: DiscreteMixture
    iteration: int
    loglik: float
    t1_norm: float


@dataclass(frozen=True, eq=False)
class EMTrajectory:
    states: tuple[EMState, ...]
    mode: Literal["standard", "gradient"]
    data_mode: Literal["population", "sample"]
    tau: float | None
    diverged: bool

    @property
    def final(self) -> EMState:
        return self.states[-1]


@dataclass(frozen=True)
class EMConfig:
    mode: Literal["standard", "gradient"] = "standard"
    max_iter: int = 50
    tol: float = 1e-10
    tau: float | None = None  # required for gradient mode

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.mode == "gradient":
            if self.tau is None or self.tau <= 0:
                raise ValueError("gradient mode requires tau > 0")
        elif self.mode != "standard":
            raise ValueError(f"unknown mode {self.mode!r}")


def make_state(mix: DiscreteMixture, ev, iteration: int = 0) -> EMState:
    value, _ = population_loglik(ev, mix)
    t1 = float(np.linalg.norm(mix.weights @ mix.centers))
    return EMState(mix=mix, iteration=iteration, loglik=value, t1_norm=t1)


def weight_expectation(mix: DiscreteMixture, ev) -> np.ndarray:
    """E_Y[w(Y, chi)] per component; equals 1 + O(sigma^-2) near the truth."""
    ew, _ = posterior_moments(ev, mix)
    return ew


def em_step(state: EMState, ev) -> EMState:
    """Standard EM: theta_chi <- E_Y[w(Y,chi) Y] / E_Y[w(Y,chi)]."""
    ew, ewy = posterior_moments(ev, state.mix)
    if np.any(ew < _EW_FLOOR):
        bad = int(np.argmin(ew))
        raise NumericalDegeneracyError(
            f"E[w] underflow for component {bad}: {ew[bad]!r}"
        )
    new_mix = state.mix.with_centers(ewy / ew[:, None])
    return make_state(new_mix, ev, state.iteration + 1)


def gradient_em_step(state: EMState, tau: float, ev) -> EMState:
    """Gradient EM: theta <- theta + tau * grad L(theta)."""
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    grad = grad_population_loglik(ev, state.mix)
    new_mix = state.mix.with_centers(state.mix.centers + tau * grad)
    return make_state(new_mix, ev, state.iteration + 1)


def run_em(init: DiscreteMixture, config: EMConfig, ev) -> EMTrajectory:
    """Iterate EM until the center update is below tol or max_iter."""
    data_mode = "population" if isinstance(ev, LikelihoodEvaluator) else "sample"
    state = make_state(init, ev)
    states = [state]
    diverged = False
    for _ in range(config.max_iter):
        if config.mode == "standard":
            nxt = em_step(state, ev)
        else:
            nxt = gradient_em_step(state, config.tau, ev)
        states.append(nxt)
        if np.abs(nxt.mix.centers).max() > _DIVERGENCE_NORM:
            diverged = True
            break
        delta = np.abs(nxt.mix.centers - state.mix.centers).max()
        state = nxt
        if delta < config.tol:
            break
    return EMTrajectory(
        states=tuple(states),
        mode=config.mode,
        data_mode=data_mode,
        tau=config.tau,
        diverged=diverged,
    )


@dataclass(frozen=True, eq=False)
class T1ScanResult:
    sigma_grid: np.ndarray
    t1_norms: np.ndarray
    fitted_slope: float
    slope_stderr: float


def t1_one_step_scan(
    truth: DiscreteMixture,
    init: DiscreteMixture,
    sigma_grid,
    method: Quadrature = Quadrature(),
    radius: float = 2.0,
) -> T1ScanResult:
    """||T_1|| after one standard EM step, per sigma, with a log-log fit.

    Requires the truth to be centered (T_1* = 0) and every iterate to
    satisfy ||theta||_inf / sigma <= radius, matching the hypothesis of
    the one-step first-moment bound (theoretical slope -1).
    """
    t1_star = float(np.linalg.norm(truth.weights @ truth.centers))
    if t1_star > 1e-10:
        raise PreconditionError(f"truth must have T_1 = 0, got ||T_1*|| = {t1_star:.3e}")
    sigmas = np.asarray(sigma_grid, dtype=float)
    sup = float(np.linalg.norm(init.centers, axis=1).max())
    norms = np.empty(len(sigmas))
    for i, sigma in enumerate(sigmas):
        if sup / sigma > radius:
            raise PreconditionError(
                f"||theta||_inf / sigma = {sup / sigma:.3f} exceeds R = {radius} at sigma = {sigma}"
            )
        ev = LikelihoodEvaluator(truth, NoiseScale(float(sigma)), method)
        stepped = em_step(make_state(init, ev), ev)
        norms[i] = stepped.t1_norm
    slope, stderr = fit_loglog_slope(sigmas, norms)
    return T1ScanResult(sigma_grid=sigmas, t1_norms=norms, fitted_slope=slope, slope_stderr=stderr)


def orbit_em_step(theta: np.ndarray, group: FiniteGroupAction, ev) -> np.ndarray:
    """Standard EM on the generating vector of an orbit model.

    theta' = sum_chi gamma_chi E_Y[w(Y, chi) g_chi^{-1} Y].
    """
    mix = orbit_mixture(group, [(theta, 1.0)])
    _, ewy = posterior_moments(ev, mix)
    # g orthogonal: g^{-1} = g^T, and E[w g^{-1} Y] = g^T E[w Y]
    return np.einsum("c,cij,ci->j", group.weights, group.elements, ewy)


def orbit_gradient(theta: np.ndarray, group: FiniteGroupAction, ev) -> np.ndarray:
    """Gradient of L with respect to the orbit-generating vector.

    Chain rule through theta_chi = g_chi theta: sum_chi g_chi^T grad_chi L.
    """
    mix = orbit_mixture(group, [(theta, 1.0)])
    grads = grad_population_loglik(ev, mix)
    return np.einsum("cij,ci->j", group.elements, grads)


def loglik_is_monotone(traj: EMTrajectory, tol: float = 1e-9) -> bool:
    """Population standard EM never decreases the log-likelihood."""
    vals = [s.loglik for s in traj.states]
    return all(b >= a - tol for a, b in zip(vals, vals[1:]))
