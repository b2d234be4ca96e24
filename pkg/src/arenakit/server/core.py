"""Central arena service: policy registry, blind sessions, credits, leaderboard.

All state lives in transactional storage; every mutating method runs one
transaction, so a feedback submission and an expiry sweep racing on the same
session resolve to exactly one winner. The clock and random generator are
injectable, which makes assignments, deadlines and leaderboards reproducible
under a fixed seed.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone

import numpy as np

from .. import gateway
from ..ranking import EmConfig, Outcome, PreferenceRecord, bt_mle, elo, fit_em, pack_dataset, progress_ranking, rank_from_scores
from ..ranking.io import records_to_csv
from . import errors
from .storage import Storage

POLICY_STATUSES = ("pending_safety", "active", "deprecated")
PREFERENCES = ("A", "B", "tie")
LEADERBOARD_METHODS = ("task_em", "bt", "elo", "progress")
LEADERBOARD_FILTERS = ("all", "open_source")


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


def _iso(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat(timespec="microseconds")


def _parse_iso(text: str) -> datetime:
    return datetime.fromisoformat(text)


@dataclass(frozen=True)
class ArenaConfig:
    session_timeout_s: float = 1800.0
    max_open_sessions: int = 3
    sponsored_base: int = 0
    seed: int = 0
    probe_timeout_s: float = 5.0
    proxy_timeout_s: float = 15.0
    em: EmConfig = field(default_factory=EmConfig)


class ArenaService:
    def __init__(self, storage: Storage, config: ArenaConfig | None = None,
                 clock=None, rng=None, prober=None):
        self.storage = storage
        self.config = config or ArenaConfig()
        self.clock = clock or utc_now
        self.rng = rng if rng is not None else np.random.default_rng(self.config.seed)
        self.prober = prober or (lambda endpoint: gateway.probe_conformance(
            endpoint, timeout_s=self.config.probe_timeout_s))

    # -- identifiers ----------------------------------------------------

    def _uuid(self) -> str:
        return str(uuid.UUID(bytes=bytes(self.rng.bytes(16)), version=4))

    def _token(self) -> str:
        return "ep" + bytes(self.rng.bytes(16)).hex()

    # -- evaluators ------------------------------------------------------

    def register_evaluator(self, evaluator_id: str) -> dict:
        if not evaluator_id or not isinstance(evaluator_id, str):
            raise errors.validation_failed("evaluator_id must be a non-empty string")
        with self.storage.transaction() as conn:
            row = conn.execute("SELECT 1 FROM evaluators WHERE evaluator_id = ?", (evaluator_id,)).fetchone()
            if row:
                raise errors.duplicate_evaluator(evaluator_id)
            conn.execute(
                "INSERT INTO evaluators (evaluator_id, sponsored_base, earned, spent, created_at)"
                " VALUES (?, ?, 0, 0, ?)",
                (evaluator_id, self.config.sponsored_base, _iso(self.clock())))
        return self.get_evaluator(evaluator_id)

    def get_evaluator(self, evaluator_id: str) -> dict:
        with self.storage.read() as conn:
            row = conn.execute("SELECT * FROM evaluators WHERE evaluator_id = ?", (evaluator_id,)).fetchone()
        if row is None:
            raise errors.unknown_evaluator(evaluator_id)
        return {
            "evaluator_id": row["evaluator_id"],
            "earned": row["earned"],
            "spent": row["spent"],
            "sponsored_base": row["sponsored_base"],
            "balance": row["earned"] + row["sponsored_base"] - row["spent"],
        }

    # -- policies ---------------------------------------------------------

    def register_policy(self, display_name: str, endpoint: str, open_source: bool,
                        owner: str) -> dict:
        if not display_name or not endpoint or not owner:
            raise errors.validation_failed("display_name, endpoint and owner are required")
        if not (endpoint.startswith("http://") or endpoint.startswith("https://")):
            raise errors.validation_failed(f"endpoint {endpoint!r} is not a valid http(s) address")
        report = self.prober(endpoint)
        if not report.schema_ok:
            if report.error_kind == "malformed":
                raise errors.endpoint_nonconformant(endpoint, report.error or "schema violation")
            raise errors.unreachable_endpoint(endpoint, report.error or "no response")
        policy_id = self._uuid()
        with self.storage.transaction() as conn:
            conn.execute(
                "INSERT INTO policies (policy_id, display_name, endpoint, status, open_source, owner, created_at)"
                " VALUES (?, ?, ?, 'pending_safety', ?, ?, ?)",
                (policy_id, display_name, endpoint, int(bool(open_source)), owner, _iso(self.clock())))
        return self.get_policy(policy_id)

    def get_policy(self, policy_id: str) -> dict:
        with self.storage.read() as conn:
            row = conn.execute("SELECT * FROM policies WHERE policy_id = ?", (policy_id,)).fetchone()
        if row is None:
            raise errors.policy_not_found(policy_id)
        return {
            "policy_id": row["policy_id"],
            "display_name": row["display_name"],
            "endpoint": row["endpoint"],
            "status": row["status"],
            "open_source": bool(row["open_source"]),
            "owner": row["owner"],
            "created_at": row["created_at"],
        }

    def set_policy_status(self, policy_id: str, status: str) -> dict:
        if status not in POLICY_STATUSES:
            raise errors.bad_status(status)
        with self.storage.transaction() as conn:
            changed = conn.execute("UPDATE policies SET status = ? WHERE policy_id = ?",
                                   (status, policy_id)).rowcount
            if changed == 0:
                raise errors.policy_not_found(policy_id)
        return self.get_policy(policy_id)

    def _active_policies(self, conn) -> list:
        return conn.execute("SELECT * FROM policies WHERE status = 'active' ORDER BY rowid").fetchall()

    # -- sessions ----------------------------------------------------------

    def _session_view(self, row) -> dict:
        # Double-blind: the view carries opaque proxy paths only, never
        # policy ids, names or raw endpoints.
        return {
            "session_id": row["session_id"],
            "endpoints": {"A": f"/proxy/{row['token_a']}", "B": f"/proxy/{row['token_b']}"},
            "created_at": row["created_at"],
            "deadline": row["deadline"],
            "state": row["state"],
        }

    def request_session(self, evaluator_id: str, own_policy_id: str | None = None) -> dict:
        with self.storage.transaction() as conn:
            evaluator = conn.execute("SELECT * FROM evaluators WHERE evaluator_id = ?",
                                     (evaluator_id,)).fetchone()
            if evaluator is None:
                raise errors.unknown_evaluator(evaluator_id)
            open_count = conn.execute(
                "SELECT COUNT(*) AS c FROM sessions WHERE evaluator_id = ? AND state = 'assigned'",
                (evaluator_id,)).fetchone()["c"]
            if open_count >= self.config.max_open_sessions:
                raise errors.too_many_open_sessions(self.config.max_open_sessions)
            actives = self._active_policies(conn)
            own_request = own_policy_id is not None
            if own_request:
                own = conn.execute("SELECT * FROM policies WHERE policy_id = ?",
                                   (own_policy_id,)).fetchone()
                if own is None:
                    raise errors.policy_not_found(own_policy_id)
                if own["owner"] != evaluator_id:
                    raise errors.not_policy_owner(own_policy_id, evaluator_id)
                if own["status"] != "active":
                    raise errors.policy_not_active(own_policy_id)
                balance = evaluator["earned"] + evaluator["sponsored_base"] - evaluator["spent"]
                if balance < 1:
                    raise errors.insufficient_credit(balance)
                others = [p for p in actives if p["policy_id"] != own_policy_id]
                if not others:
                    raise errors.too_few_active_policies()
                opponent = others[int(self.rng.integers(0, len(others)))]
                pair = [own, opponent]
                conn.execute("UPDATE evaluators SET spent = spent + 1 WHERE evaluator_id = ?",
                             (evaluator_id,))
            else:
                if len(actives) < 2:
                    raise errors.too_few_active_policies()
                idx = self.rng.choice(len(actives), size=2, replace=False)
                pair = [actives[int(idx[0])], actives[int(idx[1])]]
            if int(self.rng.integers(0, 2)):
                pair.reverse()
            session_id = self._uuid()
            now = self.clock()
            deadline = now + timedelta(seconds=self.config.session_timeout_s)
            conn.execute(
                "INSERT INTO sessions (session_id, evaluator_id, policy_a, policy_b, token_a, token_b,"
                " created_at, deadline, state, own_request) VALUES (?, ?, ?, ?, ?, ?, ?, ?, 'assigned', ?)",
                (session_id, evaluator_id, pair[0]["policy_id"], pair[1]["policy_id"],
                 self._token(), self._token(), _iso(now), _iso(deadline), int(own_request)))
            row = conn.execute("SELECT * FROM sessions WHERE session_id = ?", (session_id,)).fetchone()
            return self._session_view(row)

    def request_own_eval(self, evaluator_id: str, policy_id: str) -> dict:
        """Spend one credit to compare the evaluator's own policy against the pool."""
        return self.request_session(evaluator_id, own_policy_id=policy_id)

    def get_session(self, session_id: str) -> dict:
        with self.storage.read() as conn:
            row = conn.execute("SELECT * FROM sessions WHERE session_id = ?", (session_id,)).fetchone()
        if row is None:
            raise errors.session_not_found(session_id)
        return self._session_view(row)

    def resolve_token(self, token: str) -> str:
        """Real policy endpoint behind a session token; live sessions only."""
        with self.storage.read() as conn:
            row = conn.execute(
                "SELECT s.state, p.endpoint FROM sessions s JOIN policies p ON p.policy_id ="
                " CASE WHEN s.token_a = ? THEN s.policy_a ELSE s.policy_b END"
                " WHERE s.token_a = ? OR s.token_b = ?",
                (token, token, token)).fetchone()
        if row is None or row["state"] != "assigned":
            raise errors.unknown_token(token)
        return row["endpoint"]

    # -- feedback ----------------------------------------------------------

    @staticmethod
    def _validate_feedback(payload: dict) -> dict:
        problems = []
        instruction = payload.get("instruction")
        if not instruction or not str(instruction).strip():
            problems.append("instruction must be non-empty")
        for key in ("progress_a", "progress_b"):
            value = payload.get(key)
            if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value <= 100:
                problems.append(f"{key} must be an integer in [0, 100]")
        preference = payload.get("preference")
        if preference not in PREFERENCES:
            problems.append(f"preference must be one of {PREFERENCES}")
        explanation = payload.get("explanation")
        if not explanation or not str(explanation).strip():
            problems.append("explanation must be non-empty")
        media_refs = payload.get("media_refs", [])
        if not isinstance(media_refs, list) or not all(isinstance(x, str) for x in media_refs):
            problems.append("media_refs must be a list of strings")
        if problems:
            raise errors.validation_failed("; ".join(problems))
        return {
            "instruction": str(instruction),
            "progress_a": payload["progress_a"],
            "progress_b": payload["progress_b"],
            "preference": preference,
            "explanation": str(explanation),
            "media_refs": media_refs,
        }

    def submit_feedback(self, session_id: str, payload: dict,
                        idempotency_key: str | None = None) -> dict:
        clean = self._validate_feedback(payload)
        with self.storage.transaction() as conn:
            row = conn.execute("SELECT * FROM sessions WHERE session_id = ?", (session_id,)).fetchone()
            if row is None:
                raise errors.session_not_found(session_id)
            if row["state"] != "assigned":
                if idempotency_key is not None:
                    stored = conn.execute(
                        "SELECT idempotency_key FROM feedback WHERE session_id = ?",
                        (session_id,)).fetchone()
                    if stored and stored["idempotency_key"] == idempotency_key:
                        return self._ack(conn, session_id, row["evaluator_id"], replay=True)
                raise errors.session_closed(session_id, row["state"])
            now = self.clock()
            if now >= _parse_iso(row["deadline"]):
                raise errors.session_expired(session_id)
            changed = conn.execute(
                "UPDATE sessions SET state = 'completed' WHERE session_id = ? AND state = 'assigned'",
                (session_id,)).rowcount
            if changed != 1:
                raise errors.session_closed(session_id, "cancelled")
            conn.execute(
                "INSERT INTO feedback (session_id, instruction, progress_a, progress_b, preference,"
                " explanation, media_refs, submitted_at, policy_a, policy_b, evaluator_id, idempotency_key)"
                " VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
                (session_id, clean["instruction"], clean["progress_a"], clean["progress_b"],
                 clean["preference"], clean["explanation"], json.dumps(clean["media_refs"]),
                 _iso(now), row["policy_a"], row["policy_b"], row["evaluator_id"], idempotency_key))
            conn.execute("UPDATE evaluators SET earned = earned + 1 WHERE evaluator_id = ?",
                         (row["evaluator_id"],))
            return self._ack(conn, session_id, row["evaluator_id"], replay=False)

    def _ack(self, conn, session_id: str, evaluator_id: str, replay: bool) -> dict:
        ev = conn.execute("SELECT * FROM evaluators WHERE evaluator_id = ?", (evaluator_id,)).fetchone()
        return {
            "status": "ok",
            "session_id": session_id,
            "replayed": replay,
            "earned": ev["earned"],
            "balance": ev["earned"] + ev["sponsored_base"] - ev["spent"],
        }

    def cancel_expired_sessions(self, now: datetime | None = None) -> list[str]:
        """Cancel every assigned session strictly past its deadline."""
        now = now or self.clock()
        cutoff = _iso(now)
        with self.storage.transaction() as conn:
            rows = conn.execute(
                "SELECT session_id FROM sessions WHERE state = 'assigned' AND deadline < ?"
                " ORDER BY rowid", (cutoff,)).fetchall()
            ids = [r["session_id"] for r in rows]
            for session_id in ids:
                conn.execute(
                    "UPDATE sessions SET state = 'cancelled' WHERE session_id = ? AND state = 'assigned'",
                    (session_id,))
        return ids

    # -- leaderboard and export ---------------------------------------------

    def _policy_universe(self, conn, only_open_source: bool):
        rows = conn.execute("SELECT * FROM policies ORDER BY rowid").fetchall()
        if only_open_source:
            rows = [r for r in rows if r["open_source"]]
        return rows

    def _feedback_rows(self, conn, since: str | None = None, until: str | None = None):
        query = "SELECT * FROM feedback"
        clauses, args = [], []
        if since:
            clauses.append("submitted_at >= ?")
            args.append(since)
        if until:
            clauses.append("submitted_at < ?")
            args.append(until)
        if clauses:
            query += " WHERE " + " AND ".join(clauses)
        query += " ORDER BY rowid"
        return conn.execute(query, args).fetchall()

    @staticmethod
    def _to_record(row, index: dict[str, int]) -> PreferenceRecord:
        outcome = {"A": Outcome.WIN, "B": Outcome.LOSS, "tie": Outcome.TIE}[row["preference"]]
        return PreferenceRecord(
            trial_id=row["session_id"],
            policy_i=index[row["policy_a"]],
            policy_j=index[row["policy_b"]],
            outcome=outcome,
            progress_i=row["progress_a"] / 100.0,
            progress_j=row["progress_b"] / 100.0,
            task_label=row["instruction"],
        )

    def leaderboard(self, method: str = "task_em", filter: str = "all") -> dict:
        if method not in LEADERBOARD_METHODS:
            raise errors.validation_failed(f"method must be one of {LEADERBOARD_METHODS}")
        if filter not in LEADERBOARD_FILTERS:
            raise errors.validation_failed(f"filter must be one of {LEADERBOARD_FILTERS}")
        with self.storage.read() as conn:
            universe = self._policy_universe(conn, only_open_source=filter == "open_source")
            index = {row["policy_id"]: k for k, row in enumerate(universe)}
            records = [self._to_record(row, index) for row in self._feedback_rows(conn)
                       if row["policy_a"] in index and row["policy_b"] in index]
        if not records:
            raise errors.insufficient_data("no feedback records for this filter")
        n = len(universe)
        try:
            if method == "task_em":
                scores = fit_em(pack_dataset(records, n), self.config.em).params.theta
            elif method == "bt":
                scores = bt_mle(records, num_policies=n).scores
            elif method == "elo":
                scores = elo(records, num_policies=n).scores
            else:
                scores = progress_ranking(records, num_policies=n).scores
        except ValueError as exc:
            raise errors.insufficient_data(str(exc)) from exc
        order = rank_from_scores(scores)
        entries = [{
            "policy_id": universe[k]["policy_id"],
            "display_name": universe[k]["display_name"],
            "open_source": bool(universe[k]["open_source"]),
            "score": float(scores[k]),
        } for k in order]
        return {
            "method": method,
            "filter": filter,
            "generated_at": _iso(self.clock()),
            "record_count": len(records),
            "entries": entries,
        }

    def export_records(self, since: str | None = None, until: str | None = None) -> dict:
        """Append-order CSV of preference records plus a feedback sidecar."""
        with self.storage.read() as conn:
            universe = self._policy_universe(conn, only_open_source=False)
            index = {row["policy_id"]: k for k, row in enumerate(universe)}
            rows = self._feedback_rows(conn, since, until)
        records = [self._to_record(row, index) for row in rows]
        sidecar_lines = [json.dumps({
            "session_id": row["session_id"],
            "evaluator_id": row["evaluator_id"],
            "policy_a": row["policy_a"],
            "policy_b": row["policy_b"],
            "preference": row["preference"],
            "instruction": row["instruction"],
            "explanation": row["explanation"],
            "media_refs": json.loads(row["media_refs"]),
            "submitted_at": row["submitted_at"],
        }) for row in rows]
        return {
            "records_csv": records_to_csv(records),
            "sidecar_jsonl": "\n".join(sidecar_lines) + ("\n" if sidecar_lines else ""),
            "policy_index": {pid: k for pid, k in index.items()},
        }

    # -- proxying -----------------------------------------------------------

    def proxy_act(self, token: str, observation_json: dict) -> dict:
        """Relay one inference call to the policy behind a session token."""
        endpoint = self.resolve_token(token)
        try:
            observation = gateway.Observation.from_json(observation_json)
        except (ValueError, KeyError, TypeError) as exc:
            raise errors.validation_failed(f"bad observation: {exc}") from exc
        chunk = gateway.act(endpoint, observation, timeout_s=self.config.proxy_timeout_s)
        return chunk.to_json()
