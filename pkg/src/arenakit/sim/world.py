"""Synthetic ground-truth worlds for exercising the ranking stack.

A world is a fully known instance of the latent-bucket preference model
(starred parameters). Comparisons are sampled from it exactly as the model
defines them, so fits can be scored against analytic oracle values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..ranking import ModelParams, Outcome, PreferenceRecord, outcome_probs


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-np.asarray(x, dtype=np.float64)))


@dataclass(frozen=True)
class WorldSpec:
    """Ground-truth parameters plus the progress observation noise."""

    theta_star: np.ndarray
    tau_star: np.ndarray
    psi_star: np.ndarray
    nu_star: np.ndarray
    nu_tie_star: float
    progress_noise: float
    seed: int

    @property
    def num_policies(self) -> int:
        return self.theta_star.shape[0]

    @property
    def num_buckets(self) -> int:
        return self.tau_star.shape[0]

    def to_params(self) -> ModelParams:
        return ModelParams(theta=self.theta_star, psi=self.psi_star, tau=self.tau_star,
                           nu=self.nu_star, nu_tie=self.nu_tie_star)

    def solve_prob(self, policy: int, bucket: int) -> float:
        z = self.theta_star[policy] + self.psi_star[policy, bucket] - self.tau_star[bucket]
        return float(_sigmoid(z))

    def to_json(self) -> str:
        return json.dumps({
            "theta_star": self.theta_star.tolist(),
            "tau_star": self.tau_star.tolist(),
            "psi_star": self.psi_star.tolist(),
            "nu_star": self.nu_star.tolist(),
            "nu_tie_star": self.nu_tie_star,
            "progress_noise": self.progress_noise,
            "seed": self.seed,
        }, indent=2)

    @staticmethod
    def from_json(text: str) -> "WorldSpec":
        obj = json.loads(text)
        return WorldSpec(
            theta_star=np.array(obj["theta_star"]),
            tau_star=np.array(obj["tau_star"]),
            psi_star=np.array(obj["psi_star"]),
            nu_star=np.array(obj["nu_star"]),
            nu_tie_star=obj["nu_tie_star"],
            progress_noise=obj["progress_noise"],
            seed=obj["seed"],
        )


def sample_world(num_policies: int, num_buckets: int, seed: int, *,
                 theta_scale: float = 1.0, tau_scale: float = 1.0, psi_scale: float = 0.3,
                 nu_tie: float = 0.3, progress_noise: float = 0.1) -> WorldSpec:
    """Draw a world with unit-scale spreads so policies are discriminable.

    The solver's own init spread stays at 0.1; only the generator widens it.
    """
    if num_policies < 2 or num_buckets < 1:
        raise ValueError("need at least 2 policies and 1 bucket")
    rng = np.random.default_rng(seed)
    theta = rng.normal(0.0, theta_scale, size=num_policies)
    theta -= theta.mean()
    tau = rng.normal(0.0, tau_scale, size=num_buckets)
    tau -= tau.mean()
    psi = rng.normal(0.0, psi_scale, size=(num_policies, num_buckets))
    nu = rng.dirichlet(np.ones(num_buckets))
    return WorldSpec(theta_star=theta, tau_star=tau, psi_star=psi, nu_star=nu,
                     nu_tie_star=nu_tie, progress_noise=progress_noise, seed=seed)


def simulate_comparison(world: WorldSpec, pair: tuple[int, int], rng: np.random.Generator,
                        *, trial_id: str | None = None, bucket: int | None = None) -> PreferenceRecord:
    """Sample one A/B trial: bucket from the prior, outcome from the model,
    progress as the noisy per-bucket solve probabilities."""
    i, j = pair
    if i == j:
        raise ValueError("pair must reference distinct policies")
    if bucket is None:
        bucket = int(rng.choice(world.num_buckets, p=world.nu_star))
    pw, pd, pl = outcome_probs(world.to_params(), bucket, i, j)
    y = int(rng.choice((2, 1, 0), p=(pw, pd, pl)))
    noise = world.progress_noise
    s_i = float(np.clip(world.solve_prob(i, bucket) + noise * rng.standard_normal(), 0.0, 1.0))
    s_j = float(np.clip(world.solve_prob(j, bucket) + noise * rng.standard_normal(), 0.0, 1.0))
    if trial_id is None:
        trial_id = f"sim-{rng.integers(0, 2**63):016x}"
    return PreferenceRecord(trial_id=trial_id, policy_i=i, policy_j=j, outcome=Outcome(y),
                            progress_i=s_i, progress_j=s_j, task_label=f"bucket-{bucket}")


def oracle_scores(world: WorldSpec) -> np.ndarray:
    """Expected per-task solve probability: sum_t nu_t * sigmoid(z_{p,t})."""
    z = world.theta_star[:, None] + world.psi_star - world.tau_star[None, :]
    return (world.nu_star[None, :] * _sigmoid(z)).sum(axis=1)


def synthetic_env_step(world: WorldSpec, skill: float, rng: np.random.Generator) -> float:
    """Progress outcome for a rollout by a policy of the given skill.

    Mirrors the progress model of ``simulate_comparison``: the skill plays
    the role of the per-bucket solve probability, blurred by the world's
    progress noise and clamped to [0, 1].
    """
    if not 0.0 <= skill <= 1.0:
        raise ValueError(f"skill={skill} outside [0, 1]")
    return float(np.clip(skill + world.progress_noise * rng.standard_normal(), 0.0, 1.0))
