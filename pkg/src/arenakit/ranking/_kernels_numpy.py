"""Vectorized numpy implementations of the hot per-record-per-bucket kernels.

All kernels share one derivation. For record n in bucket t let

    u = theta[i] + psi[i, t] - tau[t],   v = theta[j] + psi[j, t] - tau[t]
    qu = sigmoid(u), qv = sigmoid(v)

with raw outcome masses

    win  = qu * (1 - qv)
    tie  = 2 * nu_tie * sqrt(qu * (1 - qu) * qv * (1 - qv))
    loss = (1 - qu) * qv

normalized by their sum S so the three outcomes form a distribution.
Because log(mass) is separable in u and v and all three masses share the
second derivative -qu*(1-qu) in u, the normalized log-likelihood has

    d log P(y)/du   = a_y - E[a],          a = (1-qu, 0.5-qu, -qu)
    d^2 log P/du^2  = -Var[a]
    d^2 log P/du dv = -Cov[a, b]           (b is the v-side analogue)

where moments are taken over the normalized outcome distribution. An
optional Gaussian progress term -c*(s - q)^2 per observed side adds its own
separable first/second derivatives.
"""

from __future__ import annotations

import numpy as np


def _log_sigmoid_pair(x):
    """(log sigmoid(x), log sigmoid(-x)) from a single exp/log1p."""
    softplus = np.log1p(np.exp(-np.abs(x)))
    return np.minimum(x, 0.0) - softplus, np.minimum(-x, 0.0) - softplus


def _edges(theta, psi, tau, i, j):
    u = theta[i][:, None] + psi[i, :] - tau[None, :]
    v = theta[j][:, None] + psi[j, :] - tau[None, :]
    return u, v


def bucket_logliks(theta, psi, tau, nu_tie, i, j, y, s_i, s_j, c_partial):
    """(M, T) log-likelihood of each record's observed outcome per bucket.

    Includes the Gaussian progress term for sides with a finite score when
    ``c_partial > 0``.
    """
    u, v = _edges(theta, psi, tau, i, j)
    lsu, lsnu = _log_sigmoid_pair(u)
    lsv, lsnv = _log_sigmoid_pair(v)
    lw, ld, ll = _masses_from_pairs(lsu, lsnu, lsv, lsnv, nu_tie)
    log_s = np.logaddexp(np.logaddexp(lw, ld), ll)
    y_col = y[:, None]
    picked = np.where(y_col == 2, lw, np.where(y_col == 1, ld, ll))
    out = picked - log_s
    if c_partial > 0.0:
        mask_i = np.isfinite(s_i)
        mask_j = np.isfinite(s_j)
        if mask_i.any():
            res = np.where(mask_i[:, None], s_i[:, None] - np.exp(lsu), 0.0)
            out = out - c_partial * res**2
        if mask_j.any():
            res = np.where(mask_j[:, None], s_j[:, None] - np.exp(lsv), 0.0)
            out = out - c_partial * res**2
    return out


def _masses_from_pairs(lsu, lsnu, lsv, lsnv, nu_tie):
    lw = lsu + lsnv
    ll = lsnu + lsv
    if nu_tie > 0.0:
        ld = np.log(2.0 * nu_tie) + 0.5 * (lsu + lsnu + lsv + lsnv)
    else:
        ld = np.full_like(lw, -np.inf)
    return lw, ld, ll


def grad_hess_accum(theta, psi, tau, nu_tie, gamma, i, j, y, s_i, s_j, c_partial):
    """Responsibility-weighted gradients and diagonal Hessians, no penalties.

    Returns (g_theta, h_theta, g_psi, h_psi, g_tau, h_tau).
    """
    n_pol = theta.shape[0]
    n_buck = tau.shape[0]
    u, v = _edges(theta, psi, tau, i, j)
    lsu, lsnu = _log_sigmoid_pair(u)
    lsv, lsnv = _log_sigmoid_pair(v)
    qu = np.exp(lsu)
    qv = np.exp(lsv)
    lw, ld, ll = _masses_from_pairs(lsu, lsnu, lsv, lsnv, nu_tie)
    log_s = np.logaddexp(np.logaddexp(lw, ld), ll)
    pw, pd, pl = np.exp(lw - log_s), np.exp(ld - log_s), np.exp(ll - log_s)

    a_w, a_d, a_l = 1.0 - qu, 0.5 - qu, -qu
    b_w, b_d, b_l = -qv, 0.5 - qv, 1.0 - qv
    mean_a = pw * a_w + pd * a_d + pl * a_l
    mean_b = pw * b_w + pd * b_d + pl * b_l
    var_a = pw * a_w**2 + pd * a_d**2 + pl * a_l**2 - mean_a**2
    var_b = pw * b_w**2 + pd * b_d**2 + pl * b_l**2 - mean_b**2
    cov_ab = pw * a_w * b_w + pd * a_d * b_d + pl * a_l * b_l - mean_a * mean_b

    y_col = y[:, None]
    a_obs = np.where(y_col == 2, a_w, np.where(y_col == 1, a_d, a_l))
    b_obs = np.where(y_col == 2, b_w, np.where(y_col == 1, b_d, b_l))
    du = a_obs - mean_a
    dv = b_obs - mean_b
    huu = -var_a
    hvv = -var_b
    huv = -cov_ab

    if c_partial > 0.0:
        vu = qu * (1.0 - qu)
        vv = qv * (1.0 - qv)
        mask_i = np.isfinite(s_i)[:, None]
        mask_j = np.isfinite(s_j)[:, None]
        res_i = np.where(mask_i, s_i[:, None] - qu, 0.0)
        res_j = np.where(mask_j, s_j[:, None] - qv, 0.0)
        du = du + 2.0 * c_partial * res_i * vu
        dv = dv + 2.0 * c_partial * res_j * vv
        huu = huu + np.where(mask_i, 2.0 * c_partial * vu * (res_i * (1.0 - 2.0 * qu) - vu), 0.0)
        hvv = hvv + np.where(mask_j, 2.0 * c_partial * vv * (res_j * (1.0 - 2.0 * qv) - vv), 0.0)

    wdu = gamma * du
    wdv = gamma * dv
    whu = gamma * huu
    whv = gamma * hvv

    g_theta = np.bincount(i, weights=wdu.sum(axis=1), minlength=n_pol)
    g_theta += np.bincount(j, weights=wdv.sum(axis=1), minlength=n_pol)
    h_theta = np.bincount(i, weights=whu.sum(axis=1), minlength=n_pol)
    h_theta += np.bincount(j, weights=whv.sum(axis=1), minlength=n_pol)

    g_psi = np.zeros((n_pol, n_buck))
    h_psi = np.zeros((n_pol, n_buck))
    np.add.at(g_psi, i, wdu)
    np.add.at(g_psi, j, wdv)
    np.add.at(h_psi, i, whu)
    np.add.at(h_psi, j, whv)

    g_tau = -(wdu + wdv).sum(axis=0)
    h_tau = (whu + whv + 2.0 * gamma * huv).sum(axis=0)
    return g_theta, h_theta, g_psi, h_psi, g_tau, h_tau


def tie_win_sums(theta, psi, tau, nu_tie, gamma, i, j):
    """Responsibility-weighted total tie and win probability mass."""
    u, v = _edges(theta, psi, tau, i, j)
    lsu, lsnu = _log_sigmoid_pair(u)
    lsv, lsnv = _log_sigmoid_pair(v)
    lw, ld, ll = _masses_from_pairs(lsu, lsnu, lsv, lsnv, nu_tie)
    log_s = np.logaddexp(np.logaddexp(lw, ld), ll)
    return float((gamma * np.exp(ld - log_s)).sum()), float((gamma * np.exp(lw - log_s)).sum())
