"""numba versions of the hot kernels; same math as ``_kernels_numpy``."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_NEG_INF = -math.inf


@njit(cache=True, inline="always")
def _log_sigmoid_pair(x):
    # (log sigmoid(x), log sigmoid(-x)) from a single exp/log1p
    softplus = math.log1p(math.exp(-abs(x)))
    if x >= 0.0:
        return -softplus, -x - softplus
    return x - softplus, -softplus


@njit(cache=True, inline="always")
def _logaddexp(a, b):
    if a == _NEG_INF:
        return b
    if b == _NEG_INF:
        return a
    if a > b:
        return a + math.log1p(math.exp(b - a))
    return b + math.log1p(math.exp(a - b))


@njit(cache=True)
def bucket_logliks(theta, psi, tau, nu_tie, i, j, y, s_i, s_j, c_partial):
    m = i.shape[0]
    n_buck = tau.shape[0]
    out = np.empty((m, n_buck))
    log_tie_scale = math.log(2.0 * nu_tie) if nu_tie > 0.0 else _NEG_INF
    for n in range(m):
        pi = i[n]
        pj = j[n]
        yn = y[n]
        si = s_i[n]
        sj = s_j[n]
        has_si = c_partial > 0.0 and math.isfinite(si)
        has_sj = c_partial > 0.0 and math.isfinite(sj)
        for t in range(n_buck):
            u = theta[pi] + psi[pi, t] - tau[t]
            v = theta[pj] + psi[pj, t] - tau[t]
            lsu, lsnu = _log_sigmoid_pair(u)
            lsv, lsnv = _log_sigmoid_pair(v)
            lw = lsu + lsnv
            ll = lsnu + lsv
            if nu_tie > 0.0:
                ld = log_tie_scale + 0.5 * (lsu + lsnu + lsv + lsnv)
            else:
                ld = _NEG_INF
            log_s = _logaddexp(_logaddexp(lw, ld), ll)
            if yn == 2:
                val = lw - log_s
            elif yn == 1:
                val = ld - log_s
            else:
                val = ll - log_s
            if has_si:
                res = si - math.exp(lsu)
                val -= c_partial * res * res
            if has_sj:
                res = sj - math.exp(lsv)
                val -= c_partial * res * res
            out[n, t] = val
    return out


@njit(cache=True)
def grad_hess_accum(theta, psi, tau, nu_tie, gamma, i, j, y, s_i, s_j, c_partial):
    n_pol = theta.shape[0]
    n_buck = tau.shape[0]
    m = i.shape[0]
    g_theta = np.zeros(n_pol)
    h_theta = np.zeros(n_pol)
    g_psi = np.zeros((n_pol, n_buck))
    h_psi = np.zeros((n_pol, n_buck))
    g_tau = np.zeros(n_buck)
    h_tau = np.zeros(n_buck)
    log_tie_scale = math.log(2.0 * nu_tie) if nu_tie > 0.0 else _NEG_INF
    for n in range(m):
        pi = i[n]
        pj = j[n]
        yn = y[n]
        si = s_i[n]
        sj = s_j[n]
        has_si = c_partial > 0.0 and math.isfinite(si)
        has_sj = c_partial > 0.0 and math.isfinite(sj)
        for t in range(n_buck):
            g = gamma[n, t]
            u = theta[pi] + psi[pi, t] - tau[t]
            v = theta[pj] + psi[pj, t] - tau[t]
            lsu, lsnu = _log_sigmoid_pair(u)
            lsv, lsnv = _log_sigmoid_pair(v)
            qu = math.exp(lsu)
            qv = math.exp(lsv)
            lw = lsu + lsnv
            ll = lsnu + lsv
            if nu_tie > 0.0:
                ld = log_tie_scale + 0.5 * (lsu + lsnu + lsv + lsnv)
            else:
                ld = _NEG_INF
            log_s = _logaddexp(_logaddexp(lw, ld), ll)
            pw = math.exp(lw - log_s)
            pd = math.exp(ld - log_s) if ld > _NEG_INF else 0.0
            pl = math.exp(ll - log_s)

            a_w = 1.0 - qu
            a_d = 0.5 - qu
            a_l = -qu
            b_w = -qv
            b_d = 0.5 - qv
            b_l = 1.0 - qv
            mean_a = pw * a_w + pd * a_d + pl * a_l
            mean_b = pw * b_w + pd * b_d + pl * b_l
            var_a = pw * a_w * a_w + pd * a_d * a_d + pl * a_l * a_l - mean_a * mean_a
            var_b = pw * b_w * b_w + pd * b_d * b_d + pl * b_l * b_l - mean_b * mean_b
            cov_ab = pw * a_w * b_w + pd * a_d * b_d + pl * a_l * b_l - mean_a * mean_b

            if yn == 2:
                a_obs = a_w
                b_obs = b_w
            elif yn == 1:
                a_obs = a_d
                b_obs = b_d
            else:
                a_obs = a_l
                b_obs = b_l
            du = a_obs - mean_a
            dv = b_obs - mean_b
            huu = -var_a
            hvv = -var_b
            huv = -cov_ab
            if has_si:
                vu = qu * (1.0 - qu)
                res = si - qu
                du += 2.0 * c_partial * res * vu
                huu += 2.0 * c_partial * vu * (res * (1.0 - 2.0 * qu) - vu)
            if has_sj:
                vv = qv * (1.0 - qv)
                res = sj - qv
                dv += 2.0 * c_partial * res * vv
                hvv += 2.0 * c_partial * vv * (res * (1.0 - 2.0 * qv) - vv)

            g_theta[pi] += g * du
            g_theta[pj] += g * dv
            h_theta[pi] += g * huu
            h_theta[pj] += g * hvv
            g_psi[pi, t] += g * du
            g_psi[pj, t] += g * dv
            h_psi[pi, t] += g * huu
            h_psi[pj, t] += g * hvv
            g_tau[t] -= g * (du + dv)
            h_tau[t] += g * (huu + hvv + 2.0 * huv)
    return g_theta, h_theta, g_psi, h_psi, g_tau, h_tau


@njit(cache=True)
def tie_win_sums(theta, psi, tau, nu_tie, gamma, i, j):
    m = i.shape[0]
    n_buck = tau.shape[0]
    total_tie = 0.0
    total_win = 0.0
    log_tie_scale = math.log(2.0 * nu_tie) if nu_tie > 0.0 else _NEG_INF
    for n in range(m):
        pi = i[n]
        pj = j[n]
        for t in range(n_buck):
            u = theta[pi] + psi[pi, t] - tau[t]
            v = theta[pj] + psi[pj, t] - tau[t]
            lsu, lsnu = _log_sigmoid_pair(u)
            lsv, lsnv = _log_sigmoid_pair(v)
            lw = lsu + lsnv
            ll = lsnu + lsv
            if nu_tie > 0.0:
                ld = log_tie_scale + 0.5 * (lsu + lsnu + lsv + lsnv)
            else:
                ld = _NEG_INF
            log_s = _logaddexp(_logaddexp(lw, ld), ll)
            total_win += gamma[n, t] * math.exp(lw - log_s)
            if ld > _NEG_INF:
                total_tie += gamma[n, t] * math.exp(ld - log_s)
    return total_tie, total_win
