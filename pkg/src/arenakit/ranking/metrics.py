"""Ranking-quality metrics and ordering helpers."""

from __future__ import annotations

import numpy as np


def rank_from_scores(scores) -> list[int]:
    """Policy indices by descending score; ties broken by ascending index."""
    scores = np.asarray(scores, dtype=np.float64)
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores must be finite")
    return list(np.argsort(-scores, kind="stable"))


def pearson_r(x, y) -> float:
    """Pearson product-moment correlation."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ValueError("inputs must be equal-length vectors with >= 2 entries")
    dx = x - x.mean()
    dy = y - y.mean()
    denom = np.sqrt((dx @ dx) * (dy @ dy))
    if denom == 0.0:
        raise ValueError("zero-variance input")
    return float((dx @ dy) / denom)


def mmrv(estimated, oracle) -> float:
    """Mean maximum rank violation.

    For each policy, the largest oracle-score gap among pairs the estimate
    orders opposite to the oracle; averaged over policies.
    """
    est = np.asarray(estimated, dtype=np.float64)
    orc = np.asarray(oracle, dtype=np.float64)
    if est.shape != orc.shape or est.ndim != 1 or est.size < 2:
        raise ValueError("inputs must be equal-length vectors with >= 2 entries")
    d_orc = orc[:, None] - orc[None, :]
    d_est = est[:, None] - est[None, :]
    violation = np.where(np.sign(d_orc) * np.sign(d_est) < 0, np.abs(d_orc), 0.0)
    return float(violation.max(axis=1).mean())
