"""Experiment runners: ranking quality vs. episode count, and drift stress.

Repetitions are independently seeded and may run on worker threads; rows are
keyed by (method, episodes, rep) so aggregation is order-independent.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..ranking import EmConfig, bt_mle, elo, fit_em, mmrv, pack_dataset, pearson_r, progress_ranking
from .world import WorldSpec, oracle_scores, sample_world, simulate_comparison

METHOD_LABELS = {"task_em": "TASK", "bt": "BT", "elo": "Elo", "progress": "PROG", "regular": "Regular"}


@dataclass(frozen=True)
class ExperimentConfig:
    num_policies: int = 7
    num_buckets: int = 5
    episode_grid: tuple[int, ...] = (25, 50, 100, 200, 400, 600)
    methods: tuple[str, ...] = ("task_em", "bt", "elo", "progress")
    repetitions: int = 20
    seed: int = 0
    psi_scale: float = 0.3
    progress_noise: float = 0.1
    em: EmConfig = field(default_factory=EmConfig)
    workers: int = 1
    # drift scenario: linear easy-to-hard bucket drift, policy churn per phase
    churn_phases: int = 4
    active_window: int | None = None
    drift_width: float = 0.25
    regular_buckets: int = 2

    def __post_init__(self):
        if tuple(sorted(self.episode_grid)) != tuple(self.episode_grid):
            raise ValueError("episode_grid must be sorted ascending")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")


@dataclass(frozen=True)
class ResultRow:
    method: str
    episodes: int
    rep: int
    seed: int
    pearson: float
    mmrv: float


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    rows: tuple[ResultRow, ...]

    def mean_pearson(self, method: str, episodes: int | None = None) -> float:
        vals = [r.pearson for r in self.rows
                if r.method == method and (episodes is None or r.episodes == episodes)]
        if not vals:
            raise KeyError(f"no rows for method={method} episodes={episodes}")
        return float(np.mean(vals))

    def mean_mmrv(self, method: str, episodes: int | None = None) -> float:
        vals = [r.mmrv for r in self.rows
                if r.method == method and (episodes is None or r.episodes == episodes)]
        if not vals:
            raise KeyError(f"no rows for method={method} episodes={episodes}")
        return float(np.mean(vals))

    def summary_rows(self):
        keys = sorted({(r.method, r.episodes) for r in self.rows})
        out = []
        for method, episodes in keys:
            r_vals = [r.pearson for r in self.rows if r.method == method and r.episodes == episodes]
            v_vals = [r.mmrv for r in self.rows if r.method == method and r.episodes == episodes]
            out.append({
                "method": method, "label": METHOD_LABELS.get(method, method), "episodes": episodes,
                "pearson_mean": float(np.mean(r_vals)), "pearson_std": float(np.std(r_vals)),
                "mmrv_mean": float(np.mean(v_vals)), "mmrv_std": float(np.std(v_vals)),
                "repetitions": len(r_vals),
            })
        return out

    def to_long_csv(self) -> str:
        """Plot-ready long format: one row per (method, episodes, rep)."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["method", "label", "episodes", "rep", "seed", "pearson_r", "mmrv"])
        for r in sorted(self.rows, key=lambda r: (r.method, r.episodes, r.rep)):
            writer.writerow([r.method, METHOD_LABELS.get(r.method, r.method), r.episodes, r.rep,
                             r.seed, repr(r.pearson), repr(r.mmrv)])
        return buf.getvalue()

    def to_summary_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["method", "label", "episodes", "pearson_mean", "pearson_std",
                         "mmrv_mean", "mmrv_std", "repetitions"])
        for row in self.summary_rows():
            writer.writerow([row["method"], row["label"], row["episodes"],
                             repr(row["pearson_mean"]), repr(row["pearson_std"]),
                             repr(row["mmrv_mean"]), repr(row["mmrv_std"]), row["repetitions"]])
        return buf.getvalue()

    def write(self, out_dir, stem: str) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{stem}_long.csv").write_text(self.to_long_csv())
        (out / f"{stem}_summary.csv").write_text(self.to_summary_csv())


def _method_scores(method: str, records, num_policies: int, em: EmConfig, seed: int):
    if method == "task_em":
        cfg = EmConfig(em_iters=em.em_iters, num_buckets=em.num_buckets, step_clip=em.step_clip,
                       l2_theta=em.l2_theta, l2_psi=em.l2_psi, step_decay=em.step_decay,
                       tol=em.tol, partial_weight=em.partial_weight, partial_sigma=em.partial_sigma,
                       seed=seed)
        return fit_em(pack_dataset(records, num_policies), cfg).params.theta
    if method == "bt":
        return bt_mle(records, num_policies=num_policies).scores
    if method == "elo":
        return elo(records, num_policies=num_policies).scores
    if method in ("progress", "regular"):
        return progress_ranking(records, num_policies=num_policies).scores
    raise ValueError(f"unknown method {method!r}")


def _uniform_pair(rng: np.random.Generator, num_policies: int) -> tuple[int, int]:
    pair = rng.choice(num_policies, size=2, replace=False)
    return int(pair[0]), int(pair[1])


def _ranking_rep(config: ExperimentConfig, rep: int) -> list[ResultRow]:
    seed = config.seed + rep
    world = sample_world(config.num_policies, config.num_buckets, seed,
                         psi_scale=config.psi_scale, progress_noise=config.progress_noise)
    oracle = oracle_scores(world)
    rng = np.random.default_rng(seed + 10_000)
    m_max = config.episode_grid[-1]
    stream = [simulate_comparison(world, _uniform_pair(rng, config.num_policies), rng,
                                  trial_id=f"r{rep}-{n}") for n in range(m_max)]
    rows = []
    for episodes in config.episode_grid:
        subset = stream[:episodes]
        for method in config.methods:
            scores = _method_scores(method, subset, config.num_policies, config.em, seed)
            rows.append(ResultRow(method=method, episodes=episodes, rep=rep, seed=seed,
                                  pearson=pearson_r(scores, oracle), mmrv=mmrv(scores, oracle)))
    return rows


def _run_reps(config: ExperimentConfig, rep_fn) -> ExperimentReport:
    if config.workers <= 1:
        nested = [rep_fn(config, rep) for rep in range(config.repetitions)]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            nested = list(pool.map(lambda rep: rep_fn(config, rep), range(config.repetitions)))
    rows = tuple(row for rep_rows in nested for row in rep_rows)
    return ExperimentReport(config=config, rows=rows)


def run_ranking_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Ranking quality of each method on growing random comparison subsets."""
    return _run_reps(config, _ranking_rep)


def _drift_rep(config: ExperimentConfig, rep: int) -> list[ResultRow]:
    seed = config.seed + rep
    world = sample_world(config.num_policies, config.num_buckets, seed,
                         psi_scale=config.psi_scale, progress_noise=config.progress_noise)
    oracle = oracle_scores(world)
    rng = np.random.default_rng(seed + 20_000)
    n_pol, n_buck = config.num_policies, config.num_buckets
    window = config.active_window or max(2, n_pol - 3)
    episodes = config.episode_grid[-1]
    # buckets ranked easy -> hard by difficulty; policies weak -> strong
    bucket_rank = np.empty(n_buck)
    bucket_rank[np.argsort(world.tau_star)] = np.arange(n_buck)
    strength_order = np.argsort(world.theta_star)
    max_phase = max(0, min(config.churn_phases - 1, n_pol - window))
    fixed_buckets = rng.choice(n_buck, size=min(config.regular_buckets, n_buck), replace=False)

    arena_records, regular_records = [], []
    for n in range(episodes):
        frac = n / max(episodes - 1, 1)
        phase = min(max_phase, int(config.churn_phases * n / episodes))
        active = strength_order[phase: phase + window]
        pick = rng.choice(window, size=2, replace=False)
        i, j = int(active[pick[0]]), int(active[pick[1]])
        if n_buck > 1:
            weights = world.nu_star * np.exp(-((bucket_rank / (n_buck - 1)) - frac) ** 2
                                             / (2.0 * config.drift_width**2))
            weights = weights / weights.sum()
            bucket = int(rng.choice(n_buck, p=weights))
        else:
            bucket = 0
        arena_records.append(simulate_comparison(world, (i, j), rng, trial_id=f"d{rep}-{n}",
                                                 bucket=bucket))
        fixed = int(rng.choice(fixed_buckets))
        regular_records.append(simulate_comparison(world, (i, j), rng, trial_id=f"f{rep}-{n}",
                                                   bucket=fixed))
    rows = []
    scores = _method_scores("task_em", arena_records, n_pol, config.em, seed)
    rows.append(ResultRow(method="task_em", episodes=episodes, rep=rep, seed=seed,
                          pearson=pearson_r(scores, oracle), mmrv=mmrv(scores, oracle)))
    reg_scores = _method_scores("regular", regular_records, n_pol, config.em, seed)
    rows.append(ResultRow(method="regular", episodes=episodes, rep=rep, seed=seed,
                          pearson=pearson_r(reg_scores, oracle), mmrv=mmrv(reg_scores, oracle)))
    return rows


def run_drift_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Easy-to-hard task drift plus policy churn, versus a fixed-lab baseline.

    The full protocol fits the task-aware model on the whole drifted stream;
    the baseline scores policies by average progress on a fixed random
    subset of buckets. Churned-out policies keep a score in both arms since
    fits cover all historical data.
    """
    return _run_reps(config, _drift_rep)
