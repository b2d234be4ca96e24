"""Command-line evaluator workflow.

Runs the full loop per session: request a blind policy pair, roll out A then
B on the same task with identical initial conditions, collect progress
scores, a preference and an explanation, submit feedback, and report the
earned-credit balance.

Scripted mode reads answers from a JSON-lines file so the loop is testable
without humans; progress and preference entries may be ``"auto"`` to derive
them from the synthetic environment's measured progress.

Exit codes: 0 success, 2 validation failure, 3 session expiry, 4 transport.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import requests

from ..gateway import PolicyClientError, TransportError
from ..sim.env import SyntheticTaskEnv
from .rollout import rollout

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_EXPIRY = 3
EXIT_TRANSPORT = 4

_EXPIRY_CODES = {"session_expired", "session_closed", "unknown_token"}


class ClientError(Exception):
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


def _validate_entry(entry: dict, line_no: int) -> dict:
    def fail(msg):
        raise ClientError(f"script line {line_no}: {msg}", EXIT_VALIDATION)

    instruction = entry.get("instruction")
    if not instruction or not str(instruction).strip():
        fail("instruction must be non-empty")
    for key in ("progress_a", "progress_b"):
        value = entry.get(key, "auto")
        if value != "auto" and (not isinstance(value, int) or isinstance(value, bool)
                                or not 0 <= value <= 100):
            fail(f"{key} must be an integer in [0, 100] or \"auto\"")
    preference = entry.get("preference", "auto")
    if preference not in ("A", "B", "tie", "auto"):
        fail(f"preference {preference!r} must be A, B, tie or \"auto\"")
    explanation = entry.get("explanation")
    if not explanation or not str(explanation).strip():
        fail("explanation must be non-empty")
    return {
        "instruction": str(instruction),
        "progress_a": entry.get("progress_a", "auto"),
        "progress_b": entry.get("progress_b", "auto"),
        "preference": preference,
        "explanation": str(explanation),
    }


def load_script(path) -> list[dict]:
    entries = []
    for line_no, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            entry = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ClientError(f"script line {line_no}: bad JSON: {exc}", EXIT_VALIDATION)
        entries.append(_validate_entry(entry, line_no))
    if not entries:
        raise ClientError("script file has no entries", EXIT_VALIDATION)
    return entries


def _prompt_entry() -> dict:
    entry = {
        "instruction": input("task instruction: ").strip(),
        "progress_a": _prompt_progress("A"),
        "progress_b": _prompt_progress("B"),
        "preference": input("preference [A/B/tie]: ").strip(),
        "explanation": input("why? "),
    }
    return _validate_entry(entry, 0)


def _prompt_progress(side: str) -> int:
    raw = input(f"progress score for policy {side} [0-100]: ").strip()
    try:
        return int(raw)
    except ValueError:
        raise ClientError(f"progress score {raw!r} is not an integer", EXIT_VALIDATION)


def _check(resp) -> dict:
    if resp.status_code < 400:
        return resp.json()
    try:
        code = resp.json()["error"]["code"]
        message = resp.json()["error"]["message"]
    except Exception:
        code, message = "http_error", f"HTTP {resp.status_code}"
    if code in _EXPIRY_CODES:
        raise ClientError(f"session lost: {message}", EXIT_EXPIRY)
    if resp.status_code >= 500:
        raise ClientError(message, EXIT_TRANSPORT)
    raise ClientError(message, EXIT_VALIDATION)


def _env_seed(session_id: str) -> int:
    return int.from_bytes(hashlib.sha256(session_id.encode()).digest()[:8], "big")


def run_session(server: str, evaluator_id: str, entry: dict, *, max_steps: int,
                timeout_s: float, media_dir: Path, own_policy: str | None = None,
                http: requests.Session | None = None) -> dict:
    """Execute one full evaluation session; returns the feedback ack."""
    http = http or requests.Session()
    server = server.rstrip("/")
    body = {"evaluator_id": evaluator_id}
    if own_policy:
        body["policy_id"] = own_policy
    try:
        view = _check(http.post(f"{server}/sessions", json=body, timeout=timeout_s))
    except requests.exceptions.RequestException as exc:
        raise ClientError(f"cannot reach server: {exc}", EXIT_TRANSPORT)
    session_id = view["session_id"]
    print(f"session {session_id}: assigned endpoints A={view['endpoints']['A']} B={view['endpoints']['B']}")

    instruction = entry["instruction"]
    seed = _env_seed(session_id)
    traces = {}
    media_refs = []
    progress = {}
    def session_lost() -> bool:
        try:
            state = http.get(f"{server}/sessions/{session_id}", timeout=timeout_s).json().get("state")
        except (requests.exceptions.RequestException, ValueError):
            return False
        return state != "assigned"

    for side in ("A", "B"):
        env = SyntheticTaskEnv(instruction, seed=seed)
        endpoint = server + view["endpoints"][side]
        try:
            trace = rollout(endpoint, env, max_steps=max_steps, timeout_s=timeout_s)
        except TransportError as exc:
            # a dead proxy token usually means the session was cancelled
            if session_lost():
                raise ClientError(f"session lost mid-run: {exc}", EXIT_EXPIRY)
            raise ClientError(f"policy call failed: {exc}", EXIT_TRANSPORT)
        except PolicyClientError as exc:
            raise ClientError(f"policy call failed: {exc}", EXIT_VALIDATION)
        traces[side] = trace
        progress[side] = trace.final_progress
        media_path = media_dir / f"{session_id}_{side}.json"
        media_path.write_text(trace.to_json())
        media_refs.append(str(media_path))
        print(f"session {session_id}: rollout {side} done, steps={trace.step_count}"
              f" progress={trace.final_progress:.3f}" + (" (aborted)" if trace.aborted else ""))

    def resolve_progress(key, side):
        value = entry[key]
        return int(round(progress[side] * 100)) if value == "auto" else value

    progress_a = resolve_progress("progress_a", "A")
    progress_b = resolve_progress("progress_b", "B")
    preference = entry["preference"]
    if preference == "auto":
        preference = "A" if progress_a > progress_b else ("B" if progress_b > progress_a else "tie")

    feedback = {
        "instruction": instruction,
        "progress_a": progress_a,
        "progress_b": progress_b,
        "preference": preference,
        "explanation": entry["explanation"],
        "media_refs": media_refs,
    }
    try:
        ack = _check(http.post(f"{server}/sessions/{session_id}/feedback", json=feedback,
                               headers={"idempotency-key": f"cli-{session_id}"}, timeout=timeout_s))
    except requests.exceptions.RequestException as exc:
        raise ClientError(f"cannot reach server: {exc}", EXIT_TRANSPORT)
    print(f"session {session_id}: submitted preference={preference}"
          f" earned={ack['earned']} balance={ack['balance']}")
    return ack


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="arenakit-eval", description="Run evaluation sessions against an arena server.")
    parser.add_argument("--server", required=True)
    parser.add_argument("--evaluator-id", required=True)
    parser.add_argument("--max-steps", type=int, default=4)
    parser.add_argument("--timeout-s", type=float, default=10.0)
    parser.add_argument("--script", default=None, help="JSONL answers file; omit for interactive prompts")
    parser.add_argument("--own-policy", default=None, help="spend a credit evaluating this policy of yours")
    parser.add_argument("--media-dir", default="media", help="where rollout traces are written")
    parser.add_argument("--register-evaluator", action="store_true",
                        help="register the evaluator id first if the server does not know it")
    args = parser.parse_args(argv)

    if args.max_steps < 1:
        print("error: --max-steps must be >= 1", file=sys.stderr)
        return EXIT_VALIDATION

    media_dir = Path(args.media_dir)
    media_dir.mkdir(parents=True, exist_ok=True)
    http = requests.Session()
    try:
        entries = load_script(args.script) if args.script else [_prompt_entry()]
        if args.register_evaluator:
            resp = http.post(f"{args.server.rstrip('/')}/evaluators",
                             json={"evaluator_id": args.evaluator_id}, timeout=args.timeout_s)
            if resp.status_code >= 400 and resp.json().get("error", {}).get("code") != "duplicate_evaluator":
                _check(resp)
        for entry in entries:
            run_session(args.server, args.evaluator_id, entry, max_steps=args.max_steps,
                        timeout_s=args.timeout_s, media_dir=media_dir,
                        own_policy=args.own_policy, http=http)
    except ClientError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except requests.exceptions.RequestException as exc:
        print(f"error: transport failure: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
