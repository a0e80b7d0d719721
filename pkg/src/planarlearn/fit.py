"""Maximum-likelihood coupling estimation on a fixed planar graph.

Newton ascent on the concave objective

    sum_ij (mu_ij theta_ij - log cosh theta_ij) - 1/2 log det(I - W(theta))

with backtracking (Armijo) line search.  The gradient is
``target_mu - mu(theta)`` and the Hessian of the log-partition function is
the step matrix.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import FitError, NumericalConsistencyError
from .graph import Graph, PlanarEmbedding, straight_line_embed
from .kacward import THETA_CAP, IsingModel, build_system, _log_det_i_minus_w, hessian, moments

MOMENT_CLAMP = 1e-6

_MIN_RIDGE = 1e-10
_MAX_RIDGE_ESCALATIONS = 6
_MIN_STEP = 1e-14


@dataclass(frozen=True)
class FitConfig:
    gradient_tolerance: float = 1e-8
    max_newton_iters: int = 50
    backtrack_shrink: float = 0.5
    sufficient_decrease: float = 0.25
    hessian_ridge: float = 0.0
    hessian_refresh_every: int = 1

    def __post_init__(self):
        if self.gradient_tolerance <= 0:
            raise ValueError("gradient_tolerance must be positive")
        if self.max_newton_iters < 0:
            raise ValueError("max_newton_iters must be nonnegative")
        if not 0 < self.backtrack_shrink < 1:
            raise ValueError("backtrack_shrink must be in (0, 1)")
        if not 0 < self.sufficient_decrease < 0.5:
            raise ValueError("sufficient_decrease must be in (0, 0.5)")
        if self.hessian_ridge < 0:
            raise ValueError("hessian_ridge must be nonnegative")
        if self.hessian_refresh_every < 1:
            raise ValueError("hessian_refresh_every must be >= 1")


@dataclass(frozen=True)
class FitReport:
    theta: np.ndarray
    log_likelihood: float
    grad_norm: float
    iterations: int
    converged: bool
    message: str = ""


def _log_cosh(x: np.ndarray) -> np.ndarray:
    # overflow-safe: log cosh x = |x| + log1p(exp(-2|x|)) - log 2
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - np.log(2.0)


def objective(
    theta: np.ndarray,
    target_mu: np.ndarray,
    graph: Graph,
    emb: PlanarEmbedding,
) -> float:
    """Concave fitting objective; equals ``mu.theta - Phi(theta) + n log 2``."""
    model = IsingModel(graph, theta)
    sys = build_system(model, emb)
    return float(
        np.dot(target_mu, theta)
        - np.sum(_log_cosh(theta))
        - 0.5 * _log_det_i_minus_w(sys)
    )


def clamp_targets(target_mu: np.ndarray, clamp: float = MOMENT_CLAMP) -> np.ndarray:
    """Clamp target moments into [-1 + clamp, 1 - clamp], warning if active."""
    target_mu = np.asarray(target_mu, dtype=float)
    limit = 1.0 - clamp
    if np.any(np.abs(target_mu) > limit):
        warnings.warn(
            "target moments at or beyond +-1 were clamped; the optimum would "
            "otherwise be at infinite coupling",
            stacklevel=3,
        )
    return np.clip(target_mu, -limit, limit)


def _solve_newton_step(H: np.ndarray, grad: np.ndarray, base_ridge: float) -> np.ndarray:
    """Ascent direction H^{-1} grad with ridge escalation on failure."""
    ridge = base_ridge
    for attempt in range(_MAX_RIDGE_ESCALATIONS + 1):
        try:
            factor = cho_factor(H + ridge * np.eye(H.shape[0]), lower=True)
            step = cho_solve(factor, grad)
        except np.linalg.LinAlgError:
            step = None
        if step is not None and (grad.size == 0 or float(grad @ step) > 0):
            return step
        ridge = max(ridge * 10.0, _MIN_RIDGE)
    raise FitError("Hessian solve failed after ridge escalation")


def fit_ml(
    graph: Graph,
    target_mu: np.ndarray,
    cfg: FitConfig | None = None,
    init_theta: np.ndarray | None = None,
    emb: PlanarEmbedding | None = None,
) -> FitReport:
    """Newton maximum-likelihood fit of edge couplings to target moments.

    Starts from zero couplings (or ``init_theta``); on convergence the fitted
    moments match the clamped targets to ``cfg.gradient_tolerance`` in the
    infinity norm.
    """
    cfg = cfg or FitConfig()
    m = len(graph.edges)
    target_mu = clamp_targets(target_mu)
    if target_mu.shape != (m,):
        raise ValueError(f"expected {m} target moments, got shape {target_mu.shape}")
    if emb is None:
        emb = straight_line_embed(graph)
    theta = np.zeros(m) if init_theta is None else np.asarray(init_theta, dtype=float).copy()

    f_cur = objective(theta, target_mu, graph, emb)
    H = None
    grad = target_mu - moments(IsingModel(graph, theta), emb)
    for it in range(cfg.max_newton_iters):
        grad_norm = float(np.max(np.abs(grad), initial=0.0))
        if grad_norm <= cfg.gradient_tolerance:
            return FitReport(theta, f_cur, grad_norm, it, True)
        if H is None or it % cfg.hessian_refresh_every == 0:
            H = hessian(IsingModel(graph, theta), emb)
        step = _solve_newton_step(H, grad, cfg.hessian_ridge)
        slope = float(grad @ step)

        # Near the optimum the predicted gain drops below the resolution of
        # the objective itself; the allowance keeps full Newton steps
        # acceptable there instead of stalling the line search.
        noise = 1e-13 * (1.0 + abs(f_cur))
        lam = 1.0
        while lam >= _MIN_STEP:
            cand = theta + lam * step
            if np.max(np.abs(cand), initial=0.0) <= THETA_CAP:
                try:
                    f_new = objective(cand, target_mu, graph, emb)
                except NumericalConsistencyError:
                    # det(I - W) underflows at extreme trial couplings and its
                    # sign becomes meaningless; treat the point as unevaluable
                    # and shrink the step.
                    f_new = None
                if f_new is not None and (
                    f_new >= f_cur + cfg.sufficient_decrease * lam * slope - noise
                ):
                    break
            lam *= cfg.backtrack_shrink
        else:
            return FitReport(
                theta, f_cur, grad_norm, it, False,
                "line search failed; targets may not be realizable",
            )
        theta = theta + lam * step
        f_cur = f_new
        grad = target_mu - moments(IsingModel(graph, theta), emb)

    grad_norm = float(np.max(np.abs(grad), initial=0.0))
    converged = grad_norm <= cfg.gradient_tolerance
    msg = "" if converged else (
        "max Newton iterations reached"
        if np.max(np.abs(theta), initial=0.0) < THETA_CAP - 1.0
        else "couplings diverged toward the cap; targets may not be realizable"
    )
    return FitReport(theta, f_cur, grad_norm, cfg.max_newton_iters, converged, msg)
