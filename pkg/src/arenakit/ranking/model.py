"""Latent-bucket preference model: probabilities, responsibilities, objective.

Outcomes are modeled per bucket with an independent-solve win/loss pair and
a geometric-mean tie mass scaled by ``nu_tie``; the three masses are
normalized per (record, bucket) so they form a proper distribution. The
bucket index is latent, so record likelihoods marginalize over the bucket
prior ``nu``.
"""

from __future__ import annotations

import numpy as np

from ._backend import get_backend
from .types import EmConfig, ModelParams, PackedDataset, PreferenceRecord, Responsibilities, pack_dataset

_DEFAULT_CONFIG = EmConfig()


def _as_packed(dataset, num_policies=None) -> PackedDataset:
    if isinstance(dataset, PackedDataset):
        return dataset
    return pack_dataset(dataset, num_policies)


def _partial_coeff(config: EmConfig | None, include_partial: bool) -> float:
    if not include_partial:
        return 0.0
    return (config or _DEFAULT_CONFIG).partial_coeff


def outcome_probs(params: ModelParams, t: int, i: int, j: int) -> tuple[float, float, float]:
    """Normalized (p_win, p_tie, p_loss) for policies (i, j) in bucket t."""
    if not 0 <= t < params.num_buckets:
        raise IndexError(f"bucket index {t} out of range")
    if not (0 <= i < params.num_policies and 0 <= j < params.num_policies):
        raise IndexError("policy index out of range")
    theta, psi, tau = params.theta, params.psi, params.tau
    u = theta[i] + psi[i, t] - tau[t]
    v = theta[j] + psi[j, t] - tau[t]
    lsu, lsnu = _log_sig(u), _log_sig(-u)
    lsv, lsnv = _log_sig(v), _log_sig(-v)
    lw = lsu + lsnv
    ll = lsnu + lsv
    if params.nu_tie > 0.0:
        ld = np.log(2.0 * params.nu_tie) + 0.5 * (lsu + lsnu + lsv + lsnv)
    else:
        ld = -np.inf
    log_s = np.logaddexp(np.logaddexp(lw, ld), ll)
    return (float(np.exp(lw - log_s)), float(np.exp(ld - log_s)), float(np.exp(ll - log_s)))


def _log_sig(x: float) -> float:
    return min(x, 0.0) - np.log1p(np.exp(-abs(x)))


def marginal_prob(params: ModelParams, record: PreferenceRecord) -> float:
    """Bucket-marginal probability of the record's observed outcome."""
    total = 0.0
    pos = {2: 0, 1: 1, 0: 2}[int(record.outcome)]
    for t in range(params.num_buckets):
        if params.nu[t] == 0.0:
            continue
        total += params.nu[t] * outcome_probs(params, t, record.policy_i, record.policy_j)[pos]
    return total


def bucket_logliks(params: ModelParams, packed: PackedDataset, *, config: EmConfig | None = None,
                   include_partial: bool = False) -> np.ndarray:
    """(M, T) per-bucket log-likelihoods of the observed outcomes."""
    kern = get_backend()
    return kern.bucket_logliks(
        params.theta, params.psi, params.tau, params.nu_tie,
        packed.i, packed.j, packed.y, packed.s_i, packed.s_j,
        _partial_coeff(config, include_partial),
    )


def _log_nu(nu: np.ndarray) -> np.ndarray:
    out = np.full_like(nu, -np.inf)
    mask = nu > 0
    out[mask] = np.log(nu[mask])
    return out


def e_step(params: ModelParams, dataset, *, config: EmConfig | None = None,
           include_partial: bool = False) -> Responsibilities:
    """Posterior bucket weights gamma[n, t] proportional to nu_t * P(y_n | t).

    Rows whose likelihood underflows to zero in every bucket get the uniform
    distribution and are reported in ``degenerate_rows``.
    """
    packed = _as_packed(dataset)
    logs = bucket_logliks(params, packed, config=config, include_partial=include_partial)
    logs = logs + _log_nu(params.nu)[None, :]
    row_max = logs.max(axis=1)
    degenerate = ~np.isfinite(row_max)
    safe_max = np.where(degenerate, 0.0, row_max)
    gamma = np.exp(logs - safe_max[:, None])
    gamma[degenerate] = 1.0
    gamma /= gamma.sum(axis=1, keepdims=True)
    return Responsibilities(gamma=gamma, degenerate_rows=tuple(np.nonzero(degenerate)[0].tolist()))


def loglik(params: ModelParams, dataset, *, config: EmConfig | None = None,
           include_partial: bool = False) -> float:
    """Observed-data log-likelihood (no penalties)."""
    packed = _as_packed(dataset)
    logs = bucket_logliks(params, packed, config=config, include_partial=include_partial)
    logs = logs + _log_nu(params.nu)[None, :]
    row_max = logs.max(axis=1)
    finite = np.isfinite(row_max)
    if not finite.all():
        return -np.inf
    return float((row_max + np.log(np.exp(logs - row_max[:, None]).sum(axis=1))).sum())


def _penalty(params: ModelParams, config: EmConfig) -> float:
    return 0.5 * config.l2_theta * float(params.theta @ params.theta) + \
        0.5 * config.l2_psi * float((params.psi**2).sum())


def penalized_loglik(params: ModelParams, dataset, config: EmConfig, *,
                     include_partial: bool = False) -> float:
    """Observed-data log-likelihood minus the L2 penalties; the fit objective."""
    return loglik(params, dataset, config=config, include_partial=include_partial) - _penalty(params, config)


def q_objective(params: ModelParams, responsibilities: Responsibilities, dataset,
                config: EmConfig, *, include_partial: bool = False) -> float:
    """Expected complete-data objective under fixed responsibilities.

    sum_n sum_t gamma[n,t] * (log nu_t + log P(y_n | t)) minus L2 penalties.
    Cells with gamma == 0 contribute nothing even when the log-term is -inf.
    """
    packed = _as_packed(dataset)
    gamma = responsibilities.gamma
    if gamma.shape != (packed.size, params.num_buckets):
        raise ValueError(f"gamma shape {gamma.shape} does not match (M={packed.size}, T={params.num_buckets})")
    logs = bucket_logliks(params, packed, config=config, include_partial=include_partial)
    logs = logs + _log_nu(params.nu)[None, :]
    total = float(np.where(gamma > 0.0, gamma * logs, 0.0).sum())
    return total - _penalty(params, config)


def grad_hess(params: ModelParams, responsibilities: Responsibilities, dataset,
              config: EmConfig, *, include_partial: bool = False):
    """Analytic gradient and diagonal Hessian of ``q_objective``.

    Returns ((g_theta, g_psi, g_tau), (h_theta, h_psi, h_tau)). Penalty terms
    are included for theta and psi; nu and nu_tie are handled by closed-form
    updates, not Newton steps.
    """
    packed = _as_packed(dataset)
    gamma = responsibilities.gamma
    if gamma.shape != (packed.size, params.num_buckets):
        raise ValueError(f"gamma shape {gamma.shape} does not match (M={packed.size}, T={params.num_buckets})")
    kern = get_backend()
    g_theta, h_theta, g_psi, h_psi, g_tau, h_tau = kern.grad_hess_accum(
        params.theta, params.psi, params.tau, params.nu_tie, gamma,
        packed.i, packed.j, packed.y, packed.s_i, packed.s_j,
        _partial_coeff(config, include_partial),
    )
    g_theta = g_theta - config.l2_theta * params.theta
    h_theta = h_theta - config.l2_theta
    g_psi = g_psi - config.l2_psi * params.psi
    h_psi = h_psi - config.l2_psi
    return (g_theta, g_psi, g_tau), (h_theta, h_psi, h_tau)


def tie_win_mass(params: ModelParams, responsibilities: Responsibilities, dataset):
    """Responsibility-weighted total (tie, win) probability mass."""
    packed = _as_packed(dataset)
    kern = get_backend()
    return kern.tie_win_sums(params.theta, params.psi, params.tau, params.nu_tie,
                             responsibilities.gamma, packed.i, packed.j)
