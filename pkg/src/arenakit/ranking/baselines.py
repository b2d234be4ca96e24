"""Baseline ranking methods: offline BT, online Elo, progress averaging."""

from __future__ import annotations

import numpy as np

from .types import PackedDataset, RankingScores, pack_dataset


def _sigmoid(x):
    return np.where(x >= 0, 1.0 / (1.0 + np.exp(-x)), np.exp(x) / (1.0 + np.exp(x)))


def _as_packed(dataset, num_policies=None) -> PackedDataset:
    if isinstance(dataset, PackedDataset):
        return dataset
    return pack_dataset(dataset, num_policies)


def bt_mle(dataset, learning_rate: float = 0.05, l2: float = 1e-2,
           max_iters: int = 2000, tol: float = 1e-6,
           num_policies: int | None = None) -> RankingScores:
    """Gradient-ascent MLE of the plain two-player model; ties count as
    half a win plus half a loss."""
    packed = _as_packed(dataset, num_policies)
    n = packed.num_policies
    if len(np.unique(np.concatenate([packed.i, packed.j]))) < 2:
        raise ValueError("dataset references fewer than 2 distinct policies")
    # 1 for a win by side i, 0 for a loss, 0.5 for a tie
    y_frac = np.where(packed.y == 2, 1.0, np.where(packed.y == 1, 0.5, 0.0))
    theta = np.zeros(n)
    for _ in range(max_iters):
        resid = y_frac - _sigmoid(theta[packed.i] - theta[packed.j])
        grad = np.bincount(packed.i, weights=resid, minlength=n)
        grad -= np.bincount(packed.j, weights=resid, minlength=n)
        grad -= l2 * theta
        step = learning_rate * grad
        theta = theta + step
        if np.max(np.abs(step)) < tol:
            break
    return RankingScores(scores=theta, method="bt")


def elo(dataset, k_factor: float = 32.0, num_policies: int | None = None) -> RankingScores:
    """One-pass online rating over the dataset in its given order."""
    if not isinstance(dataset, PackedDataset):
        dataset = list(dataset)
        if not dataset:
            return RankingScores(scores=np.zeros(num_policies or 0), method="elo")
    packed = _as_packed(dataset, num_policies)
    theta = np.zeros(packed.num_policies)
    for n in range(packed.size):
        a, b = packed.i[n], packed.j[n]
        y = 1.0 if packed.y[n] == 2 else (0.5 if packed.y[n] == 1 else 0.0)
        delta = k_factor * (y - float(_sigmoid(theta[a] - theta[b])))
        theta[a] += delta
        theta[b] -= delta
    return RankingScores(scores=theta, method="elo")


def progress_ranking(dataset, num_policies: int | None = None) -> RankingScores:
    """Mean reported progress per policy, pooled over both trial sides."""
    packed = _as_packed(dataset, num_policies)
    n = packed.num_policies
    totals = np.zeros(n)
    counts = np.zeros(n)
    mask_i = np.isfinite(packed.s_i)
    mask_j = np.isfinite(packed.s_j)
    np.add.at(totals, packed.i[mask_i], packed.s_i[mask_i])
    np.add.at(counts, packed.i[mask_i], 1.0)
    np.add.at(totals, packed.j[mask_j], packed.s_j[mask_j])
    np.add.at(counts, packed.j[mask_j], 1.0)
    referenced = np.zeros(n, dtype=bool)
    referenced[packed.i] = True
    referenced[packed.j] = True
    missing = np.nonzero(referenced & (counts == 0))[0]
    if missing.size:
        raise ValueError(f"policies without progress observations: {missing.tolist()}")
    scores = np.zeros(n)
    has = counts > 0
    scores[has] = totals[has] / counts[has]
    return RankingScores(scores=scores, method="progress")
