"""EM solver for the latent-bucket preference model.

Each iteration computes responsibilities, takes clipped Newton steps on
theta/psi/tau, refreshes nu (column means of the responsibilities) and the
tie rate, and re-centers theta and tau. A backtracking rule halves the
Newton steps (up to 10 times) whenever the penalized observed-data
log-likelihood would drop by more than 1e-9; if every halving fails, the
iteration falls back to the provably monotone nu-only update.
"""

from __future__ import annotations

import numpy as np

from .metrics import rank_from_scores
from .model import e_step, grad_hess, penalized_loglik, tie_win_mass
from .types import EmConfig, FitResult, ModelParams, PackedDataset, Responsibilities, pack_dataset

HESSIAN_FLOOR = 1e-8
MONOTONE_SLACK = 1e-9
MAX_HALVINGS = 10
NU_TIE_LO = 1e-4
NU_TIE_HI = 1.0 - 1e-4


class NonFiniteParameterError(RuntimeError):
    """A parameter update produced NaN or Inf; the fit is aborted."""


def _newton_step(g: np.ndarray, h: np.ndarray, bound: float, step_clip: float) -> np.ndarray:
    # Bounded gradient step where the curvature is too flat to trust.
    guarded = np.where(np.abs(h) >= HESSIAN_FLOOR, -g / np.where(np.abs(h) >= HESSIAN_FLOOR, h, 1.0),
                       g * step_clip / (np.abs(g) + HESSIAN_FLOOR))
    return np.clip(guarded, -bound, bound)


def _centered(x: np.ndarray) -> np.ndarray:
    return x - x.mean()


def _nu_tie_update(theta, psi, tau, nu, old_nu_tie, resp, packed) -> float:
    probe = ModelParams(theta=theta, psi=psi, tau=tau, nu=nu, nu_tie=old_nu_tie)
    tie_mass, win_mass = tie_win_mass(probe, resp, packed)
    if win_mass <= 0.0:
        return old_nu_tie
    return float(np.clip(0.5 * tie_mass / win_mass, NU_TIE_LO, NU_TIE_HI))


def m_step(params: ModelParams, responsibilities: Responsibilities, dataset,
           config: EmConfig, iteration: int, *, include_partial: bool = False,
           prev_objective: float | None = None) -> ModelParams:
    """One maximization step; returns centered, monotonicity-checked params."""
    packed = dataset if isinstance(dataset, PackedDataset) else pack_dataset(dataset)
    if prev_objective is None:
        prev_objective = penalized_loglik(params, packed, config, include_partial=include_partial)

    (g_theta, g_psi, g_tau), (h_theta, h_psi, h_tau) = grad_hess(
        params, responsibilities, packed, config, include_partial=include_partial)
    bound = config.step_clip * config.step_decay**iteration
    d_theta = _newton_step(g_theta, h_theta, bound, config.step_clip)
    d_psi = _newton_step(g_psi, h_psi, bound, config.step_clip)
    d_tau = _newton_step(g_tau, h_tau, bound, config.step_clip)

    nu_new = responsibilities.gamma.mean(axis=0)
    nu_new = nu_new / nu_new.sum()

    scale = 1.0
    for _ in range(MAX_HALVINGS + 1):
        theta_c = _centered(params.theta + scale * d_theta)
        tau_c = _centered(params.tau + scale * d_tau)
        psi_c = params.psi + scale * d_psi
        if not (np.all(np.isfinite(theta_c)) and np.all(np.isfinite(psi_c)) and np.all(np.isfinite(tau_c))):
            raise NonFiniteParameterError("parameter update produced non-finite values")
        nu_tie_c = _nu_tie_update(theta_c, psi_c, tau_c, nu_new, params.nu_tie, responsibilities, packed)
        candidate = ModelParams(theta=theta_c, psi=psi_c, tau=tau_c, nu=nu_new, nu_tie=nu_tie_c)
        objective = penalized_loglik(candidate, packed, config, include_partial=include_partial)
        if objective >= prev_objective - MONOTONE_SLACK:
            return candidate
        scale *= 0.5

    # Newton block rejected at every scale: keep theta/psi/tau/nu_tie and
    # apply only the exact nu update, which cannot decrease the objective.
    return params.replace(nu=nu_new)


def _init_params(packed: PackedDataset, config: EmConfig) -> ModelParams:
    rng = np.random.default_rng(config.seed)
    n, t = packed.num_policies, config.num_buckets
    theta = _centered(rng.normal(0.0, 0.1, size=n))
    tau = _centered(rng.normal(0.0, 0.1, size=t))
    psi = np.zeros((n, t))
    nu = np.full(t, 1.0 / t)
    return ModelParams(theta=theta, psi=psi, tau=tau, nu=nu, nu_tie=0.5)


def _fit(dataset, config: EmConfig, include_partial: bool) -> FitResult:
    packed = dataset if isinstance(dataset, PackedDataset) else pack_dataset(dataset)
    if len(np.unique(np.concatenate([packed.i, packed.j]))) < 2:
        raise ValueError("dataset references fewer than 2 distinct policies")
    params = _init_params(packed, config)
    trace: list[float] = []
    degenerate = 0
    converged = False
    iterations = 0
    objective = penalized_loglik(params, packed, config, include_partial=include_partial)
    for m in range(config.em_iters):
        resp = e_step(params, packed, config=config, include_partial=include_partial)
        degenerate = max(degenerate, len(resp.degenerate_rows))
        new_params = m_step(params, resp, packed, config, m,
                            include_partial=include_partial, prev_objective=objective)
        delta = float(np.max(np.abs(new_params.theta - params.theta)))
        params = new_params
        objective = penalized_loglik(params, packed, config, include_partial=include_partial)
        trace.append(objective)
        iterations = m + 1
        if delta < config.tol:
            converged = True
            break
    ranking = tuple(int(p) for p in rank_from_scores(params.theta))
    return FitResult(params=params, ranking=ranking, objective_trace=tuple(trace),
                     iterations_run=iterations, converged=converged, degenerate_records=degenerate)


def fit_em(dataset, config: EmConfig | None = None) -> FitResult:
    """Fit the model on preference outcomes alone."""
    return _fit(dataset, config or EmConfig(), include_partial=False)


def fit_em_partial(dataset, config: EmConfig | None = None) -> FitResult:
    """Fit with the Gaussian progress term on records that carry scores."""
    config = config or EmConfig()
    packed = dataset if isinstance(dataset, PackedDataset) else pack_dataset(dataset)
    if config.partial_weight > 0.0 and not packed.has_progress:
        raise ValueError("no record carries progress values")
    return _fit(packed, config, include_partial=config.partial_weight > 0.0)
