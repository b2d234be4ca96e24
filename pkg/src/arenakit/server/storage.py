"""Embedded transactional storage for the arena service.

sqlite in WAL mode with synchronous=FULL: a transaction is durable before
the caller sees its result, which is what the acknowledged-feedback
durability contract relies on. All mutations run inside explicit
``transaction()`` blocks serialized by a process-wide lock, so state
transitions are linearizable.
"""

from __future__ import annotations

import sqlite3
import threading
from contextlib import contextmanager

_SCHEMA = """
CREATE TABLE IF NOT EXISTS evaluators (
    evaluator_id   TEXT PRIMARY KEY,
    sponsored_base INTEGER NOT NULL,
    earned         INTEGER NOT NULL DEFAULT 0,
    spent          INTEGER NOT NULL DEFAULT 0,
    created_at     TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS policies (
    policy_id    TEXT PRIMARY KEY,
    display_name TEXT NOT NULL,
    endpoint     TEXT NOT NULL,
    status       TEXT NOT NULL,
    open_source  INTEGER NOT NULL,
    owner        TEXT NOT NULL,
    created_at   TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS sessions (
    session_id   TEXT PRIMARY KEY,
    evaluator_id TEXT NOT NULL REFERENCES evaluators(evaluator_id),
    policy_a     TEXT NOT NULL REFERENCES policies(policy_id),
    policy_b     TEXT NOT NULL REFERENCES policies(policy_id),
    token_a      TEXT NOT NULL UNIQUE,
    token_b      TEXT NOT NULL UNIQUE,
    created_at   TEXT NOT NULL,
    deadline     TEXT NOT NULL,
    state        TEXT NOT NULL,
    own_request  INTEGER NOT NULL DEFAULT 0
);
CREATE TABLE IF NOT EXISTS feedback (
    session_id      TEXT PRIMARY KEY REFERENCES sessions(session_id),
    instruction     TEXT NOT NULL,
    progress_a      INTEGER NOT NULL,
    progress_b      INTEGER NOT NULL,
    preference      TEXT NOT NULL,
    explanation     TEXT NOT NULL,
    media_refs      TEXT NOT NULL,
    submitted_at    TEXT NOT NULL,
    policy_a        TEXT NOT NULL,
    policy_b        TEXT NOT NULL,
    evaluator_id    TEXT NOT NULL,
    idempotency_key TEXT
);
CREATE INDEX IF NOT EXISTS idx_sessions_state ON sessions(state, deadline);
CREATE INDEX IF NOT EXISTS idx_sessions_evaluator ON sessions(evaluator_id, state);
"""


class Storage:
    """One sqlite database behind a lock; safe for concurrent callers."""

    def __init__(self, path: str = ":memory:"):
        self.path = path
        self._lock = threading.RLock()
        self._conn = sqlite3.connect(path, check_same_thread=False, isolation_level=None)
        self._conn.row_factory = sqlite3.Row
        self._conn.execute("PRAGMA foreign_keys = ON")
        if path != ":memory:":
            self._conn.execute("PRAGMA journal_mode = WAL")
        self._conn.execute("PRAGMA synchronous = FULL")
        # executescript autocommits; isolation_level=None keeps us in
        # autocommit mode outside explicit transaction() blocks.
        self._conn.executescript(_SCHEMA)

    @contextmanager
    def transaction(self):
        with self._lock:
            self._conn.execute("BEGIN IMMEDIATE")
            try:
                yield self._conn
            except BaseException:
                self._conn.execute("ROLLBACK")
                raise
            self._conn.execute("COMMIT")

    @contextmanager
    def read(self):
        with self._lock:
            yield self._conn

    def close(self):
        with self._lock:
            self._conn.close()
