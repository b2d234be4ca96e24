from __future__ import annotations

from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from arenakit.gateway import ConformanceReport
from arenakit.ranking import EmConfig, ModelParams, Outcome, PreferenceRecord
from arenakit.server import ArenaConfig, ArenaService, Storage


class FakeClock:
    """Deterministic clock: starts fixed, moves only via advance()."""

    def __init__(self, start: datetime | None = None):
        self.now = start or datetime(2026, 3, 1, 12, 0, 0, tzinfo=timezone.utc)

    def __call__(self) -> datetime:
        return self.now

    def advance(self, seconds: float) -> datetime:
        self.now = self.now + timedelta(seconds=seconds)
        return self.now


def ok_prober(endpoint: str) -> ConformanceReport:
    return ConformanceReport(schema_ok=True, latency_ms=1.0)


@pytest.fixture
def clock():
    return FakeClock()


@pytest.fixture
def service(clock):
    """In-memory arena service with a stub prober and fixed seed."""
    return ArenaService(
        Storage(":memory:"),
        ArenaConfig(seed=7, sponsored_base=0, session_timeout_s=1800.0),
        clock=clock,
        prober=ok_prober,
    )


def make_service(clock=None, **config_kwargs) -> ArenaService:
    cfg = ArenaConfig(**{"seed": 7, **config_kwargs})
    return ArenaService(Storage(":memory:"), cfg, clock=clock or FakeClock(), prober=ok_prober)


def register_active_policies(service: ArenaService, count: int, owner: str = "team-x",
                             open_source_mask=None):
    policy_ids = []
    for k in range(count):
        open_source = True if open_source_mask is None else bool(open_source_mask[k])
        entry = service.register_policy(f"Nimbus-{k}", f"http://policy-{k}.example:9", open_source, owner)
        service.set_policy_status(entry["policy_id"], "active")
        policy_ids.append(entry["policy_id"])
    return policy_ids


def record(i, j, outcome, trial="t", s_i=None, s_j=None, label=None):
    return PreferenceRecord(trial_id=f"{trial}-{i}-{j}-{int(outcome)}", policy_i=i, policy_j=j,
                            outcome=Outcome(outcome), progress_i=s_i, progress_j=s_j, task_label=label)


def random_dataset(rng, num_policies, num_records, with_progress=True, tie_free=False):
    records = []
    for n in range(num_records):
        i, j = rng.choice(num_policies, size=2, replace=False)
        outcome = int(rng.choice([0, 2])) if tie_free else int(rng.integers(0, 3))
        records.append(PreferenceRecord(
            trial_id=f"r{n}", policy_i=int(i), policy_j=int(j), outcome=Outcome(outcome),
            progress_i=float(rng.uniform()) if with_progress else None,
            progress_j=float(rng.uniform()) if with_progress else None))
    return records


def random_params(rng, num_policies, num_buckets, nu_tie=None):
    theta = rng.normal(0.0, 0.7, num_policies)
    psi = rng.normal(0.0, 0.4, (num_policies, num_buckets))
    tau = rng.normal(0.0, 0.7, num_buckets)
    nu = rng.dirichlet(np.ones(num_buckets))
    if nu_tie is None:
        nu_tie = float(rng.uniform(0.1, 0.8))
    return ModelParams(theta=theta, psi=psi, tau=tau, nu=nu, nu_tie=nu_tie)


@pytest.fixture
def small_config():
    return EmConfig(num_buckets=3, em_iters=20, seed=1)
