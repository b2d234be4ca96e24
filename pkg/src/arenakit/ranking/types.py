"""Core data types for the pairwise ranking engine."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np


class Outcome(IntEnum):
    """A/B trial outcome, always from the perspective of the first policy."""

    LOSS = 0
    TIE = 1
    WIN = 2


@dataclass(frozen=True)
class PreferenceRecord:
    """One pairwise A/B trial.

    ``progress_i``/``progress_j`` are fractions in [0, 1] (wire-level scores
    0-100 divided by 100); ``None`` means the evaluator did not report one.
    ``task_label`` is carried along for bookkeeping and never consumed by
    the solver.
    """

    trial_id: str
    policy_i: int
    policy_j: int
    outcome: Outcome
    progress_i: float | None = None
    progress_j: float | None = None
    task_label: str | None = None

    def __post_init__(self):
        if self.policy_i == self.policy_j:
            raise ValueError(f"record {self.trial_id!r}: policy_i == policy_j == {self.policy_i}")
        if self.policy_i < 0 or self.policy_j < 0:
            raise ValueError(f"record {self.trial_id!r}: negative policy index")
        if int(self.outcome) not in (0, 1, 2):
            raise ValueError(f"record {self.trial_id!r}: outcome must be 0, 1 or 2")
        for name in ("progress_i", "progress_j"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 1.0:
                raise ValueError(f"record {self.trial_id!r}: {name}={value} outside [0, 1]")


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the latent-bucket preference model.

    theta:  (N,) per-policy log-ability
    psi:    (N, T) per-policy per-bucket offsets
    tau:    (T,) bucket difficulties
    nu:     (T,) bucket prior, a probability simplex
    nu_tie: tie-rate scalar; 0 is allowed and disables the tie outcome
            (the tie-free restriction of the model), fits keep it in (0, 1)
    """

    theta: np.ndarray
    psi: np.ndarray
    tau: np.ndarray
    nu: np.ndarray
    nu_tie: float

    def __post_init__(self):
        theta = np.ascontiguousarray(self.theta, dtype=np.float64)
        psi = np.ascontiguousarray(self.psi, dtype=np.float64)
        tau = np.ascontiguousarray(self.tau, dtype=np.float64)
        nu = np.ascontiguousarray(self.nu, dtype=np.float64)
        n = theta.shape[0]
        t = tau.shape[0]
        if psi.shape != (n, t):
            raise ValueError(f"psi shape {psi.shape} does not match (N={n}, T={t})")
        if nu.shape != (t,):
            raise ValueError(f"nu shape {nu.shape} does not match T={t}")
        if np.any(nu < 0) or abs(nu.sum() - 1.0) > 1e-12:
            raise ValueError("nu must be nonnegative and sum to 1")
        if not 0.0 <= self.nu_tie < 1.0:
            raise ValueError(f"nu_tie={self.nu_tie} outside [0, 1)")
        for arr in (theta, psi, tau, nu):
            arr.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "nu_tie", float(self.nu_tie))

    @property
    def num_policies(self) -> int:
        return self.theta.shape[0]

    @property
    def num_buckets(self) -> int:
        return self.tau.shape[0]

    def replace(self, **changes) -> "ModelParams":
        fields_ = {"theta": self.theta, "psi": self.psi, "tau": self.tau, "nu": self.nu, "nu_tie": self.nu_tie}
        fields_.update(changes)
        return ModelParams(**fields_)


@dataclass(frozen=True)
class EmConfig:
    """Solver configuration. Defaults follow the reference hyperparameters."""

    em_iters: int = 60
    num_buckets: int = 60
    step_clip: float = 1.0
    l2_theta: float = 1e-2
    l2_psi: float = 1e-2
    step_decay: float = 0.99
    tol: float = 1e-4
    partial_weight: float = 1.0
    partial_sigma: float = 0.25
    seed: int = 0

    def __post_init__(self):
        if self.em_iters < 1 or self.num_buckets < 1:
            raise ValueError("em_iters and num_buckets must be >= 1")
        if self.step_clip <= 0 or not 0 < self.step_decay <= 1 or self.tol <= 0:
            raise ValueError("step_clip and tol must be positive, step_decay in (0, 1]")
        if self.l2_theta < 0 or self.l2_psi < 0 or self.partial_weight < 0:
            raise ValueError("l2 penalties and partial_weight must be nonnegative")
        if self.partial_sigma <= 0:
            raise ValueError("partial_sigma must be positive")

    @property
    def partial_coeff(self) -> float:
        """Coefficient of the squared progress residual in the log-likelihood."""
        return self.partial_weight / (2.0 * self.partial_sigma**2)


@dataclass(frozen=True)
class Responsibilities:
    """Posterior bucket weights, one row per record.

    ``degenerate_rows`` lists records whose all-bucket likelihood underflowed
    to zero; those rows were replaced by the uniform distribution.
    """

    gamma: np.ndarray
    degenerate_rows: tuple[int, ...] = ()

    def __post_init__(self):
        gamma = np.ascontiguousarray(self.gamma, dtype=np.float64)
        gamma.setflags(write=False)
        object.__setattr__(self, "gamma", gamma)


@dataclass(frozen=True)
class FitResult:
    """Outcome of an EM fit.

    ``objective_trace`` holds the penalized observed-data log-likelihood
    after each iteration; backtracking keeps it non-decreasing up to 1e-9.
    """

    params: ModelParams
    ranking: tuple[int, ...]
    objective_trace: tuple[float, ...]
    iterations_run: int
    converged: bool
    degenerate_records: int = 0

    @property
    def q_trace(self) -> tuple[float, ...]:
        return self.objective_trace


RANKING_METHODS = ("task_em", "bt", "elo", "progress")


@dataclass(frozen=True)
class RankingScores:
    """Per-policy scores produced by one ranking method."""

    scores: np.ndarray
    method: str

    def __post_init__(self):
        scores = np.ascontiguousarray(self.scores, dtype=np.float64)
        if self.method not in RANKING_METHODS:
            raise ValueError(f"unknown method {self.method!r}, expected one of {RANKING_METHODS}")
        if not np.all(np.isfinite(scores)):
            raise ValueError("scores must be finite")
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)


@dataclass(frozen=True)
class PackedDataset:
    """Dataset flattened to arrays for the numeric kernels.

    Progress columns use NaN for "absent".
    """

    i: np.ndarray
    j: np.ndarray
    y: np.ndarray
    s_i: np.ndarray
    s_j: np.ndarray
    num_policies: int

    @property
    def size(self) -> int:
        return self.i.shape[0]

    @property
    def has_progress(self) -> bool:
        return bool(np.any(np.isfinite(self.s_i)) or np.any(np.isfinite(self.s_j)))


def pack_dataset(records, num_policies: int | None = None) -> PackedDataset:
    """Flatten records into contiguous arrays; infers N as max index + 1."""
    records = list(records)
    if not records:
        raise ValueError("empty dataset")
    m = len(records)
    i = np.empty(m, dtype=np.int64)
    j = np.empty(m, dtype=np.int64)
    y = np.empty(m, dtype=np.int64)
    s_i = np.full(m, np.nan)
    s_j = np.full(m, np.nan)
    for n, rec in enumerate(records):
        i[n] = rec.policy_i
        j[n] = rec.policy_j
        y[n] = int(rec.outcome)
        if rec.progress_i is not None:
            s_i[n] = rec.progress_i
        if rec.progress_j is not None:
            s_j[n] = rec.progress_j
    inferred = int(max(i.max(), j.max())) + 1
    if num_policies is None:
        num_policies = inferred
    elif num_policies < inferred:
        raise ValueError(f"num_policies={num_policies} but dataset references index {inferred - 1}")
    for arr in (i, j, y, s_i, s_j):
        arr.setflags(write=False)
    return PackedDataset(i=i, j=j, y=y, s_i=s_i, s_j=s_j, num_policies=num_policies)
