"""Dataset and fit-result serialization.

Two interchange formats for preference records: CSV with the columns
(trial_id, policy_i, policy_j, outcome, progress_i, progress_j, task_label)
where outcome is one of win/tie/loss and empty progress cells mean absent,
and JSON lines with the same fields. Floats are written with ``repr`` so a
roundtrip is bit-exact.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .types import FitResult, Outcome, PreferenceRecord

CSV_COLUMNS = ("trial_id", "policy_i", "policy_j", "outcome", "progress_i", "progress_j", "task_label")

_OUTCOME_TO_NAME = {Outcome.WIN: "win", Outcome.TIE: "tie", Outcome.LOSS: "loss"}
_NAME_TO_OUTCOME = {v: k for k, v in _OUTCOME_TO_NAME.items()}


def _record_row(rec: PreferenceRecord) -> list[str]:
    return [
        rec.trial_id,
        str(rec.policy_i),
        str(rec.policy_j),
        _OUTCOME_TO_NAME[Outcome(rec.outcome)],
        "" if rec.progress_i is None else repr(rec.progress_i),
        "" if rec.progress_j is None else repr(rec.progress_j),
        rec.task_label or "",
    ]


def _row_record(row: dict) -> PreferenceRecord:
    outcome = row["outcome"].strip().lower()
    if outcome not in _NAME_TO_OUTCOME:
        raise ValueError(f"unknown outcome {row['outcome']!r}, expected win/tie/loss")
    return PreferenceRecord(
        trial_id=row["trial_id"],
        policy_i=int(row["policy_i"]),
        policy_j=int(row["policy_j"]),
        outcome=_NAME_TO_OUTCOME[outcome],
        progress_i=float(row["progress_i"]) if row.get("progress_i") else None,
        progress_j=float(row["progress_j"]) if row.get("progress_j") else None,
        task_label=row.get("task_label") or None,
    )


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow(_record_row(rec))
    return buf.getvalue()


def records_from_csv(text: str) -> list[PreferenceRecord]:
    reader = csv.DictReader(io.StringIO(text))
    return [_row_record(row) for row in reader]


def write_csv(records, path) -> None:
    Path(path).write_text(records_to_csv(records))


def read_csv(path) -> list[PreferenceRecord]:
    return records_from_csv(Path(path).read_text())


def records_to_jsonl(records) -> str:
    lines = []
    for rec in records:
        lines.append(json.dumps({
            "trial_id": rec.trial_id,
            "policy_i": rec.policy_i,
            "policy_j": rec.policy_j,
            "outcome": _OUTCOME_TO_NAME[Outcome(rec.outcome)],
            "progress_i": rec.progress_i,
            "progress_j": rec.progress_j,
            "task_label": rec.task_label,
        }))
    return "\n".join(lines) + ("\n" if lines else "")


def records_from_jsonl(text: str) -> list[PreferenceRecord]:
    records = []
    for line in text.splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        records.append(PreferenceRecord(
            trial_id=obj["trial_id"],
            policy_i=obj["policy_i"],
            policy_j=obj["policy_j"],
            outcome=_NAME_TO_OUTCOME[obj["outcome"]],
            progress_i=obj.get("progress_i"),
            progress_j=obj.get("progress_j"),
            task_label=obj.get("task_label"),
        ))
    return records


def write_jsonl(records, path) -> None:
    Path(path).write_text(records_to_jsonl(records))


def read_jsonl(path) -> list[PreferenceRecord]:
    return records_from_jsonl(Path(path).read_text())


def fit_result_to_json(result: FitResult) -> str:
    """Structured text export of a fit: parameters, ranking and trace."""
    payload = {
        "params": {
            "theta": result.params.theta.tolist(),
            "psi": result.params.psi.tolist(),
            "tau": result.params.tau.tolist(),
            "nu": result.params.nu.tolist(),
            "nu_tie": result.params.nu_tie,
        },
        "ranking": list(result.ranking),
        "objective_trace": list(result.objective_trace),
        "iterations_run": result.iterations_run,
        "converged": result.converged,
        "degenerate_records": result.degenerate_records,
    }
    return json.dumps(payload, indent=2)


def write_fit_result(result: FitResult, path) -> None:
    Path(path).write_text(fit_result_to_json(result))
